#pragma once

// Linear constant propagation transfer functions. Each output variable is a
// constant, a*u+b for a single input u, or top. Compose/apply/render follow
// path order: compose(f, g) applies f first.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfas/cp.hpp"
#include "dfas/expr.hpp"
#include "dfas/integer.hpp"

namespace dfas {

struct LcpFormula {
    enum class Kind { Const, Affine, Top };
    Kind kind = Kind::Top;
    Int a;       // Affine, non-zero
    int src = -1;
    Int b;       // Const value or Affine offset

    static LcpFormula constant(Int c) { return {Kind::Const, Int(0), -1, std::move(c)}; }
    static LcpFormula affine(Int a, int src, Int b) {
        if (a == 0) return constant(std::move(b));
        return {Kind::Affine, std::move(a), src, std::move(b)};
    }
    static LcpFormula copy(int src) { return affine(Int(1), src, Int(0)); }
    static LcpFormula top() { return {}; }

    [[nodiscard]] bool is_top() const { return kind == Kind::Top; }
    [[nodiscard]] bool is_const() const { return kind == Kind::Const; }
    [[nodiscard]] bool is_affine() const { return kind == Kind::Affine; }

    friend bool operator==(const LcpFormula& x, const LcpFormula& y) {
        if (x.kind != y.kind) return false;
        switch (x.kind) {
        case Kind::Const: return x.b == y.b;
        case Kind::Affine: return x.a == y.a && x.src == y.src && x.b == y.b;
        default: return true;
        }
    }
};

class LcpFunction {
  public:
    LcpFunction() = default;

    static LcpFunction identity(std::size_t nvars) {
        LcpFunction f;
        for (std::size_t i = 0; i < nvars; ++i) f.out_.push_back(LcpFormula::copy(static_cast<int>(i)));
        return f;
    }
    static LcpFunction bot(std::size_t nvars) {
        LcpFunction f = identity(nvars);
        f.bot_ = true;
        return f;
    }
    static LcpFunction of(std::vector<LcpFormula> out) {
        LcpFunction f;
        f.out_ = std::move(out);
        return f;
    }

    [[nodiscard]] bool is_bot() const { return bot_; }
    [[nodiscard]] std::size_t size() const { return out_.size(); }
    [[nodiscard]] const LcpFormula& operator[](std::size_t v) const { return out_[v]; }
    [[nodiscard]] const std::vector<LcpFormula>& formulas() const { return out_; }
    void set(std::size_t v, LcpFormula f) { out_[v] = std::move(f); }

    friend bool operator==(const LcpFunction& x, const LcpFunction& y) {
        if (x.bot_ != y.bot_) return false;
        return x.bot_ ? x.out_.size() == y.out_.size() : x.out_ == y.out_;
    }

  private:
    bool bot_ = false;
    std::vector<LcpFormula> out_;
};

class DomainMismatch : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

inline void check_universe(std::size_t a, std::size_t b) {
    if (a != b)
        throw DomainMismatch("transfer functions over different variable universes (" + std::to_string(a) + " vs " +
                             std::to_string(b) + ")");
}

// Substitute g's formula through f's outputs.
inline LcpFormula lcp_substitute(const LcpFunction& f, const LcpFormula& g) {
    if (!g.is_affine()) return g;
    const auto& inner = f[static_cast<std::size_t>(g.src)];
    switch (inner.kind) {
    case LcpFormula::Kind::Const: return LcpFormula::constant(g.a * inner.b + g.b);
    case LcpFormula::Kind::Affine: return LcpFormula::affine(g.a * inner.a, inner.src, g.a * inner.b + g.b);
    default: return LcpFormula::top();
    }
}

// f first, then g.
inline LcpFunction lcp_compose(const LcpFunction& f, const LcpFunction& g) {
    check_universe(f.size(), g.size());
    if (f.is_bot() || g.is_bot()) return LcpFunction::bot(f.size());
    std::vector<LcpFormula> out;
    out.reserve(g.size());
    for (const auto& gv : g.formulas()) out.push_back(lcp_substitute(f, gv));
    return LcpFunction::of(std::move(out));
}

// Structural pointwise join: disagreement is top.
inline LcpFunction lcp_join(const LcpFunction& f, const LcpFunction& g) {
    check_universe(f.size(), g.size());
    if (f.is_bot()) return g;
    if (g.is_bot()) return f;
    LcpFunction out = f;
    for (std::size_t v = 0; v < f.size(); ++v)
        if (!(f[v] == g[v])) out.set(v, LcpFormula::top());
    return out;
}

inline bool lcp_leq(const LcpFunction& f, const LcpFunction& g) {
    check_universe(f.size(), g.size());
    if (f.is_bot()) return true;
    if (g.is_bot()) return false;
    for (std::size_t v = 0; v < f.size(); ++v)
        if (!g[v].is_top() && !(f[v] == g[v])) return false;
    return true;
}

inline CpVal lcp_eval(const LcpFormula& f, const CpEnv& env) {
    switch (f.kind) {
    case LcpFormula::Kind::Const: return f.b;
    case LcpFormula::Kind::Affine: {
        const auto& u = env[static_cast<std::size_t>(f.src)];
        if (!u) return std::nullopt;
        return Int(f.a * *u + f.b);
    }
    default: return std::nullopt;
    }
}

inline CpEnv lcp_apply(const LcpFunction& f, const CpEnv& env) {
    if (!env.reachable() || f.is_bot()) return CpEnv::bottom(f.size());
    check_universe(f.size(), env.size());
    std::vector<CpVal> out;
    out.reserve(f.size());
    for (const auto& fv : f.formulas()) out.push_back(lcp_eval(fv, env));
    return CpEnv::of(std::move(out));
}

inline LcpFormula lcp_from_expr(const Expr& e) {
    auto lin = to_linear(e);
    if (!lin) return LcpFormula::top();
    if (lin->coeff.empty()) return LcpFormula::constant(lin->constant);
    if (lin->coeff.size() == 1) {
        const auto& [src, a] = *lin->coeff.begin();
        return LcpFormula::affine(a, src, lin->constant);
    }
    return LcpFormula::top();
}

inline LcpFunction lcp_from_action(const Action& action, std::size_t nvars) {
    LcpFunction f = LcpFunction::identity(nvars);
    for (const auto& st : action.stmts) {
        const auto* a = std::get_if<Assign>(&st);
        if (!a) continue;
        LcpFunction step = LcpFunction::identity(nvars);
        step.set(static_cast<std::size_t>(a->var), lcp_from_expr(*a->rhs));
        f = lcp_compose(f, step);
    }
    return f;
}

namespace detail {

// Solve t = b (mod m) jointly with t = b2 (mod m2); m, m2 > 0.
inline bool crt_merge(Int& b, Int& m, Int b2, const Int& m2) {
    Int g = gcd(m, m2);
    Int diff = b2 - b;
    if (diff % g != 0) return false;
    // Solve m*k = diff (mod m2) by brute extended Euclid.
    Int old_r = m, r = m2, old_s = 1, s = 0;
    while (r != 0) {
        Int q = old_r / r;
        Int tmp = old_r - q * r;
        old_r = r;
        r = tmp;
        tmp = old_s - q * s;
        old_s = s;
        s = tmp;
    }
    // old_s * m = g (mod m2)
    Int m2g = m2 / g;
    Int k = ((diff / g) * old_s) % m2g;
    if (k < 0) k += m2g;
    b = b + m * k;
    m = m * m2g;
    b %= m;
    if (b < 0) b += m;
    return true;
}

// Is formula fv dominated, for every CP input, by the join of the given formulas?
inline bool formula_dominated(const LcpFormula& fv, const std::vector<const LcpFormula*>& members) {
    for (const auto* g : members)
        if (g->is_top()) return true;
    if (members.empty()) return false;

    // Agreement region: inputs on which every member yields the same integer t.
    std::optional<Int> t;
    std::map<int, std::vector<const LcpFormula*>> by_src;
    for (const auto* g : members) {
        if (g->is_const()) {
            if (t && *t != g->b) return true; // members never agree
            t = g->b;
        } else {
            by_src[g->src].push_back(g);
        }
    }
    // Two distinct formulas on the same source pin that source, hence t.
    for (auto& [src, fs] : by_src) {
        for (std::size_t i = 1; i < fs.size(); ++i) {
            if (*fs[i] == *fs[0]) continue;
            Int da = fs[0]->a - fs[i]->a;
            Int db = fs[i]->b - fs[0]->b;
            if (da == 0) return true;
            if (db % da != 0) return true;
            Int u = db / da;
            Int tv = fs[0]->a * u + fs[0]->b;
            if (t && *t != tv) return true;
            t = tv;
        }
    }
    if (t) {
        std::map<int, Int> point;
        for (const auto& [src, fs] : by_src) {
            for (const auto* g : fs) {
                Int num = *t - g->b;
                if (num % g->a != 0) return true;
                Int u = num / g->a;
                auto it = point.find(src);
                if (it != point.end() && it->second != u) return true;
                point[src] = u;
            }
        }
        if (fv.is_const()) return fv.b == *t;
        if (fv.is_affine()) {
            auto it = point.find(fv.src);
            if (it == point.end()) return false;
            return fv.a * it->second + fv.b == *t;
        }
        return false;
    }

    // t ranges over a congruence class t = b (mod m); each source has one formula.
    Int b = 0, m = 1;
    for (const auto& [src, fs] : by_src) {
        const auto* g = fs[0];
        Int am = g->a < 0 ? Int(-g->a) : g->a;
        Int gb = g->b % am;
        if (gb < 0) gb += am;
        if (!crt_merge(b, m, gb, am)) return true;
    }
    if (!fv.is_affine()) return false;
    auto it = by_src.find(fv.src);
    return it != by_src.end() && fv == *it->second[0];
}

} // namespace detail

// Exact semantic test: f(E) is below the join of g(E) over the set, for every
// CP environment E. Not the same as lcp_leq(f, join of set): the structural
// join puts x'=x+1 under {x'=x, x'=5}, yet at x=5 the members agree on 5.
inline bool lcp_dominated(const LcpFunction& f, const std::vector<const LcpFunction*>& set) {
    if (f.is_bot()) return true;
    std::vector<const LcpFunction*> live;
    for (const auto* g : set) {
        check_universe(f.size(), g->size());
        if (!g->is_bot()) live.push_back(g);
    }
    if (live.empty()) return false;
    std::vector<const LcpFormula*> column(live.size());
    for (std::size_t v = 0; v < f.size(); ++v) {
        for (std::size_t i = 0; i < live.size(); ++i) column[i] = &(*live[i])[v];
        if (!detail::formula_dominated(f[v], column)) return false;
    }
    return true;
}

inline std::string render(const LcpFormula& f, const std::vector<std::string>& names) {
    switch (f.kind) {
    case LcpFormula::Kind::Const: return f.b.str();
    case LcpFormula::Kind::Affine: {
        std::string s;
        if (f.a == -1) s = "-";
        else if (f.a != 1) s = f.a.str() + "*";
        s += names.at(static_cast<std::size_t>(f.src));
        if (f.b > 0) s += "+" + f.b.str();
        else if (f.b < 0) s += f.b.str();
        return s;
    }
    default: return "⊤";
    }
}

// "t'=1,x'=x+3,y'=x+2,z'=1"
inline std::string render(const LcpFunction& f, const std::vector<std::string>& names) {
    if (f.is_bot()) return "⊥";
    std::string out;
    for (std::size_t v = 0; v < f.size(); ++v) {
        if (v) out += ",";
        out += names.at(v) + "'=" + render(f[v], names);
    }
    return out;
}

} // namespace dfas
