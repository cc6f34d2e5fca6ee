#pragma once

// Integer/boolean expressions and the statements that label transitions.
//
// Statement text forms: "skip", "x := e", "c ! m", "c ? m", "assume e".
// A transition label is a ';'-separated sequence of statements.

#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dfas/integer.hpp"

namespace dfas {

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(const std::string& what, std::size_t column)
        : std::runtime_error(what), column_(column) {}
    // 1-based column within the parsed text.
    [[nodiscard]] std::size_t column() const { return column_; }

  private:
    std::size_t column_;
};

enum class Op {
    Const, Var, True, False,
    Neg, Add, Sub, Mul, Div, Mod,
    Eq, Ne, Lt, Le, Gt, Ge,
    Not, And, Or,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    Op op = Op::Const;
    Int value;        // Const
    int var = -1;     // Var
    ExprPtr lhs, rhs; // unary ops use lhs

    [[nodiscard]] bool is_bool() const {
        switch (op) {
        case Op::True: case Op::False: case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le:
        case Op::Gt: case Op::Ge: case Op::Not: case Op::And: case Op::Or:
            return true;
        default:
            return false;
        }
    }
};

inline ExprPtr make_const(Int v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Const;
    e->value = std::move(v);
    return e;
}

inline ExprPtr make_var(int v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Var;
    e->var = v;
    return e;
}

inline ExprPtr make_node(Op op, ExprPtr lhs, ExprPtr rhs = nullptr) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

inline void collect_vars(const Expr& e, std::vector<int>& out) {
    if (e.op == Op::Var) {
        out.push_back(e.var);
        return;
    }
    if (e.lhs) collect_vars(*e.lhs, out);
    if (e.rhs) collect_vars(*e.rhs, out);
}

namespace detail {

inline int precedence(Op op) {
    switch (op) {
    case Op::Or: return 1;
    case Op::And: return 2;
    case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: return 3;
    case Op::Add: case Op::Sub: return 4;
    case Op::Mul: case Op::Div: case Op::Mod: return 5;
    default: return 6;
    }
}

inline const char* symbol(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    default: return "?";
    }
}

} // namespace detail

// Renders with minimal parentheses; parse(render(e)) is structurally equal to e.
inline std::string render(const Expr& e, const std::vector<std::string>& names, int parent_prec = 0) {
    std::string s;
    int prec = detail::precedence(e.op);
    switch (e.op) {
    case Op::Const:
        s = e.value.str();
        if (e.value < 0 && parent_prec > 0) s = "(" + s + ")";
        return s;
    case Op::Var: return names.at(static_cast<std::size_t>(e.var));
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Neg: s = "-" + render(*e.lhs, names, 6); break;
    case Op::Not: s = "!" + render(*e.lhs, names, 6); break;
    default:
        // Left-associative: the right operand needs parentheses at equal precedence.
        s = render(*e.lhs, names, prec) + " " + detail::symbol(e.op) + " " + render(*e.rhs, names, prec + 1);
        break;
    }
    if (prec < parent_prec) return "(" + s + ")";
    return s;
}

class ExprParser {
  public:
    using Resolver = std::function<std::optional<int>(std::string_view)>;

    ExprParser(std::string_view text, Resolver resolve, std::size_t offset = 0)
        : text_(text), resolve_(std::move(resolve)), offset_(offset) {}

    ExprPtr parse_int() {
        auto e = parse_or();
        if (e->is_bool()) fail("expected an integer expression");
        return e;
    }

    ExprPtr parse_bool() {
        auto e = parse_or();
        if (!e->is_bool()) fail("expected a boolean expression");
        return e;
    }

    void expect_end() {
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg + " at column " + std::to_string(offset_ + pos_ + 1), offset_ + pos_ + 1);
    }

  private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok) {
        skip_ws();
        if (text_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    ExprPtr require_bool(ExprPtr e) {
        if (!e->is_bool()) fail("expected a boolean operand");
        return e;
    }

    ExprPtr require_int(ExprPtr e) {
        if (e->is_bool()) fail("expected an integer operand");
        return e;
    }

    ExprPtr parse_or() {
        auto lhs = parse_and();
        while (accept("||")) lhs = make_node(Op::Or, require_bool(lhs), require_bool(parse_and()));
        return lhs;
    }

    ExprPtr parse_and() {
        auto lhs = parse_not();
        while (accept("&&")) lhs = make_node(Op::And, require_bool(lhs), require_bool(parse_not()));
        return lhs;
    }

    ExprPtr parse_not() {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '!' && text_.substr(pos_, 2) != "!=") {
            ++pos_;
            return make_node(Op::Not, require_bool(parse_not()));
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        auto lhs = parse_add();
        static constexpr std::pair<std::string_view, Op> ops[] = {
            {"==", Op::Eq}, {"!=", Op::Ne}, {"<=", Op::Le}, {">=", Op::Ge}, {"<", Op::Lt}, {">", Op::Gt}};
        for (auto [tok, op] : ops) {
            if (accept(tok)) return make_node(op, require_int(lhs), require_int(parse_add()));
        }
        return lhs;
    }

    ExprPtr parse_add() {
        auto lhs = parse_mul();
        for (;;) {
            if (accept("+")) lhs = make_node(Op::Add, require_int(lhs), require_int(parse_mul()));
            else if (accept("-")) lhs = make_node(Op::Sub, require_int(lhs), require_int(parse_mul()));
            else return lhs;
        }
    }

    ExprPtr parse_mul() {
        auto lhs = parse_unary();
        for (;;) {
            if (accept("*")) lhs = make_node(Op::Mul, require_int(lhs), require_int(parse_unary()));
            else if (accept("/")) lhs = make_node(Op::Div, require_int(lhs), require_int(parse_unary()));
            else if (accept("%")) lhs = make_node(Op::Mod, require_int(lhs), require_int(parse_unary()));
            else return lhs;
        }
    }

    ExprPtr parse_unary() {
        if (accept("-")) {
            auto inner = require_int(parse_unary());
            if (inner->op == Op::Const) return make_const(-inner->value);
            return make_node(Op::Neg, inner);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_or();
            if (!accept(")")) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            return make_const(Int(std::string(text_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            auto name = text_.substr(start, pos_ - start);
            if (name == "true") return make_node(Op::True, nullptr);
            if (name == "false") return make_node(Op::False, nullptr);
            auto idx = resolve_(name);
            if (!idx) {
                pos_ = start;
                fail("unknown identifier '" + std::string(name) + "'");
            }
            return make_var(*idx);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    Resolver resolve_;
    std::size_t offset_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Statements

struct Skip {};
struct Assign {
    int var;
    ExprPtr rhs;
};
struct Send {
    std::string channel, message;
};
struct Receive {
    std::string channel, message;
};
struct Assume {
    ExprPtr cond;
};

using Statement = std::variant<Skip, Assign, Send, Receive, Assume>;

// A transition label: statements executed left to right.
struct Action {
    std::vector<Statement> stmts;

    [[nodiscard]] bool is_identity() const {
        for (const auto& s : stmts)
            if (std::holds_alternative<Assign>(s)) return false;
        return true;
    }
    [[nodiscard]] const Send* send() const {
        for (const auto& s : stmts)
            if (auto p = std::get_if<Send>(&s)) return p;
        return nullptr;
    }
    [[nodiscard]] const Receive* receive() const {
        for (const auto& s : stmts)
            if (auto p = std::get_if<Receive>(&s)) return p;
        return nullptr;
    }
};

inline std::string render(const Statement& s, const std::vector<std::string>& names) {
    return std::visit(
        [&](const auto& st) -> std::string {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, Skip>) return "skip";
            else if constexpr (std::is_same_v<T, Assign>) return names.at(st.var) + " := " + render(*st.rhs, names);
            else if constexpr (std::is_same_v<T, Send>) return st.channel + " ! " + st.message;
            else if constexpr (std::is_same_v<T, Receive>) return st.channel + " ? " + st.message;
            else return "assume " + render(*st.cond, names);
        },
        s);
}

inline std::string render(const Action& a, const std::vector<std::string>& names) {
    std::string out;
    for (const auto& s : a.stmts) {
        if (!out.empty()) out += "; ";
        out += render(s, names);
    }
    return out.empty() ? "skip" : out;
}

namespace detail {

inline std::string_view trim(std::string_view s, std::size_t& lead) {
    lead = 0;
    while (lead < s.size() && std::isspace(static_cast<unsigned char>(s[lead]))) ++lead;
    std::size_t end = s.size();
    while (end > lead && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(lead, end - lead);
}

inline bool is_ident(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

inline Statement parse_statement(std::string_view text, std::size_t offset, const ExprParser::Resolver& resolve) {
    std::size_t lead = 0;
    auto s = trim(text, lead);
    offset += lead;
    if (s == "skip") return Skip{};
    if (s.substr(0, 7) == "assume " || s.substr(0, 7) == "assume(") {
        ExprParser p(s.substr(6), resolve, offset + 6);
        auto cond = p.parse_bool();
        p.expect_end();
        return Assume{cond};
    }
    if (auto pos = s.find(":="); pos != std::string_view::npos) {
        std::size_t l2 = 0;
        auto lhs = trim(s.substr(0, pos), l2);
        auto idx = is_ident(lhs) ? resolve(lhs) : std::nullopt;
        if (!idx) throw SyntaxError("unknown assignment target '" + std::string(lhs) + "' at column " +
                                        std::to_string(offset + l2 + 1),
                                    offset + l2 + 1);
        ExprParser p(s.substr(pos + 2), resolve, offset + pos + 2);
        auto rhs = p.parse_int();
        p.expect_end();
        return Assign{*idx, rhs};
    }
    for (char opch : {'!', '?'}) {
        if (auto pos = s.find(opch); pos != std::string_view::npos) {
            std::size_t l1 = 0, l2 = 0;
            auto ch = trim(s.substr(0, pos), l1);
            auto msg = trim(s.substr(pos + 1), l2);
            if (!is_ident(ch) || !is_ident(msg))
                throw SyntaxError("malformed queue operation at column " + std::to_string(offset + 1), offset + 1);
            if (opch == '!') return Send{std::string(ch), std::string(msg)};
            return Receive{std::string(ch), std::string(msg)};
        }
    }
    throw SyntaxError("unrecognised statement '" + std::string(s) + "' at column " + std::to_string(offset + 1),
                      offset + 1);
}

} // namespace detail

inline Action parse_action(std::string_view text, const ExprParser::Resolver& resolve) {
    Action a;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(';', start);
        if (end == std::string_view::npos) end = text.size();
        auto piece = text.substr(start, end - start);
        std::size_t lead = 0;
        if (!detail::trim(piece, lead).empty()) {
            auto st = detail::parse_statement(piece, start, resolve);
            if (!std::holds_alternative<Skip>(st)) a.stmts.push_back(std::move(st));
        }
        start = end + 1;
    }
    return a;
}

inline ExprPtr parse_bool_expr(std::string_view text, const ExprParser::Resolver& resolve) {
    ExprParser p(text, resolve);
    auto e = p.parse_bool();
    p.expect_end();
    return e;
}

inline ExprParser::Resolver resolver_for(const std::vector<std::string>& names) {
    return [&names](std::string_view n) -> std::optional<int> {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
        return std::nullopt;
    };
}

// ---------------------------------------------------------------------------
// Linear normal form: sum of coeff*var plus a constant.

struct LinearForm {
    std::map<int, Int> coeff; // only non-zero entries
    Int constant;
};

namespace detail {

inline LinearForm lin_add(LinearForm a, const LinearForm& b, int sign) {
    for (const auto& [v, c] : b.coeff) {
        a.coeff[v] += sign * c;
        if (a.coeff[v] == 0) a.coeff.erase(v);
    }
    a.constant += sign * b.constant;
    return a;
}

inline LinearForm lin_scale(LinearForm a, const Int& k) {
    if (k == 0) return LinearForm{};
    for (auto& [v, c] : a.coeff) c *= k;
    a.constant *= k;
    return a;
}

} // namespace detail

// nullopt when the expression is not affine (products of variables, division, modulo).
inline std::optional<LinearForm> to_linear(const Expr& e) {
    using detail::lin_add;
    using detail::lin_scale;
    switch (e.op) {
    case Op::Const: return LinearForm{{}, e.value};
    case Op::Var: return LinearForm{{{e.var, Int(1)}}, Int(0)};
    case Op::Neg: {
        auto a = to_linear(*e.lhs);
        if (!a) return std::nullopt;
        return lin_scale(*a, Int(-1));
    }
    case Op::Add:
    case Op::Sub: {
        auto a = to_linear(*e.lhs);
        auto b = to_linear(*e.rhs);
        if (!a || !b) return std::nullopt;
        return lin_add(*a, *b, e.op == Op::Add ? 1 : -1);
    }
    case Op::Mul: {
        auto a = to_linear(*e.lhs);
        auto b = to_linear(*e.rhs);
        if (!a || !b) return std::nullopt;
        if (a->coeff.empty()) return lin_scale(*b, a->constant);
        if (b->coeff.empty()) return lin_scale(*a, b->constant);
        return std::nullopt;
    }
    case Op::Div:
    case Op::Mod: {
        auto a = to_linear(*e.lhs);
        auto b = to_linear(*e.rhs);
        if (!a || !b || !a->coeff.empty() || !b->coeff.empty() || b->constant == 0) return std::nullopt;
        return LinearForm{{}, e.op == Op::Div ? a->constant / b->constant : a->constant % b->constant};
    }
    default: return std::nullopt;
    }
}

} // namespace dfas
