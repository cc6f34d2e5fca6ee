#pragma once

// Constant propagation values: per-variable constant or top, plus an
// unreachable bottom element.

#include <optional>
#include <string>
#include <vector>

#include "dfas/expr.hpp"
#include "dfas/integer.hpp"

namespace dfas {

// nullopt is top.
using CpVal = std::optional<Int>;

class CpEnv {
  public:
    CpEnv() = default;

    static CpEnv bottom(std::size_t nvars) {
        CpEnv e;
        e.vals_.assign(nvars, std::nullopt);
        return e;
    }
    static CpEnv top(std::size_t nvars) {
        CpEnv e = bottom(nvars);
        e.reachable_ = true;
        return e;
    }
    static CpEnv of(std::vector<CpVal> vals) {
        CpEnv e;
        e.reachable_ = true;
        e.vals_ = std::move(vals);
        return e;
    }
    static CpEnv constants(const std::vector<Int>& vals) {
        std::vector<CpVal> v(vals.begin(), vals.end());
        return of(std::move(v));
    }

    [[nodiscard]] bool reachable() const { return reachable_; }
    [[nodiscard]] std::size_t size() const { return vals_.size(); }
    [[nodiscard]] const CpVal& operator[](std::size_t i) const { return vals_[i]; }
    [[nodiscard]] const std::vector<CpVal>& values() const { return vals_; }

    void set(std::size_t i, CpVal v) { vals_[i] = std::move(v); }

    friend bool operator==(const CpEnv& a, const CpEnv& b) {
        if (a.reachable_ != b.reachable_) return false;
        return !a.reachable_ || a.vals_ == b.vals_;
    }

  private:
    bool reachable_ = false;
    std::vector<CpVal> vals_;
};

inline CpVal cp_val_join(const CpVal& a, const CpVal& b) {
    if (a && b && *a == *b) return a;
    return std::nullopt;
}

inline CpEnv cp_join(const CpEnv& a, const CpEnv& b) {
    if (!a.reachable()) return b;
    if (!b.reachable()) return a;
    CpEnv out = a;
    for (std::size_t i = 0; i < a.size(); ++i) out.set(i, cp_val_join(a[i], b[i]));
    return out;
}

inline bool cp_leq(const CpEnv& a, const CpEnv& b) {
    if (!a.reachable()) return true;
    if (!b.reachable()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (b[i] && a[i] != b[i]) return false;
    return true;
}

// CP has finite height, so join already terminates.
inline CpEnv cp_widen(const CpEnv& older, const CpEnv& newer) { return cp_join(older, newer); }

inline CpVal cp_eval(const Expr& e, const CpEnv& env) {
    auto bin = [&](auto&& f) -> CpVal {
        auto l = cp_eval(*e.lhs, env);
        auto r = cp_eval(*e.rhs, env);
        if (!l || !r) return std::nullopt;
        return f(*l, *r);
    };
    switch (e.op) {
    case Op::Const: return e.value;
    case Op::Var: return env[static_cast<std::size_t>(e.var)];
    case Op::Neg: {
        auto v = cp_eval(*e.lhs, env);
        if (!v) return std::nullopt;
        return Int(-*v);
    }
    case Op::Add: return bin([](const Int& a, const Int& b) -> CpVal { return Int(a + b); });
    case Op::Sub: return bin([](const Int& a, const Int& b) -> CpVal { return Int(a - b); });
    case Op::Mul: {
        // 0 * top is still 0.
        auto l = cp_eval(*e.lhs, env);
        auto r = cp_eval(*e.rhs, env);
        if ((l && *l == 0) || (r && *r == 0)) return Int(0);
        if (!l || !r) return std::nullopt;
        return Int(*l * *r);
    }
    case Op::Div:
        return bin([](const Int& a, const Int& b) -> CpVal {
            if (b == 0) return std::nullopt;
            return Int(a / b);
        });
    case Op::Mod:
        return bin([](const Int& a, const Int& b) -> CpVal {
            if (b == 0) return std::nullopt;
            return Int(a % b);
        });
    default: return std::nullopt;
    }
}

// Three-valued: nullopt when the outcome depends on a non-constant.
inline std::optional<bool> cp_eval_bool(const Expr& e, const CpEnv& env) {
    auto cmp = [&](auto&& f) -> std::optional<bool> {
        auto l = cp_eval(*e.lhs, env);
        auto r = cp_eval(*e.rhs, env);
        if (!l || !r) return std::nullopt;
        return f(*l, *r);
    };
    switch (e.op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Eq: return cmp([](const Int& a, const Int& b) { return a == b; });
    case Op::Ne: return cmp([](const Int& a, const Int& b) { return a != b; });
    case Op::Lt: return cmp([](const Int& a, const Int& b) { return a < b; });
    case Op::Le: return cmp([](const Int& a, const Int& b) { return a <= b; });
    case Op::Gt: return cmp([](const Int& a, const Int& b) { return a > b; });
    case Op::Ge: return cmp([](const Int& a, const Int& b) { return a >= b; });
    case Op::Not: {
        auto v = cp_eval_bool(*e.lhs, env);
        if (!v) return std::nullopt;
        return !*v;
    }
    case Op::And: {
        auto l = cp_eval_bool(*e.lhs, env);
        auto r = cp_eval_bool(*e.rhs, env);
        if ((l && !*l) || (r && !*r)) return false;
        if (!l || !r) return std::nullopt;
        return true;
    }
    case Op::Or: {
        auto l = cp_eval_bool(*e.lhs, env);
        auto r = cp_eval_bool(*e.rhs, env);
        if ((l && *l) || (r && *r)) return true;
        if (!l || !r) return std::nullopt;
        return false;
    }
    default: return std::nullopt;
    }
}

// Guards are not used for pruning; assume behaves as skip.
inline CpEnv cp_transfer(const Action& action, CpEnv env) {
    if (!env.reachable()) return env;
    for (const auto& st : action.stmts) {
        if (auto a = std::get_if<Assign>(&st)) env.set(static_cast<std::size_t>(a->var), cp_eval(*a->rhs, env));
    }
    return env;
}

inline std::string render_cp_val(const CpVal& v) { return v ? v->str() : "⊤"; }

// "t=1,x=⊤,y=⊤,z=1", or "⊥".
inline std::string render(const CpEnv& env, const std::vector<std::string>& names) {
    if (!env.reachable()) return "⊥";
    std::string out;
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (i) out += ",";
        out += names.at(i) + "=" + render_cp_val(env[i]);
    }
    return out;
}

} // namespace dfas
