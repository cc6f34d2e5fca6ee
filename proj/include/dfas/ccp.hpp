#pragma once

// Copy constant propagation: each output variable is a constant, a copy of
// one input, or top. A sub-lattice of LCP; to_lcp is the embedding.

#include <string>
#include <vector>

#include "dfas/lcp.hpp"

namespace dfas {

struct CcpFormula {
    enum class Kind { Const, Copy, Top };
    Kind kind = Kind::Top;
    Int value;
    int src = -1;

    static CcpFormula constant(Int c) { return {Kind::Const, std::move(c), -1}; }
    static CcpFormula copy(int src) { return {Kind::Copy, Int(0), src}; }
    static CcpFormula top() { return {}; }

    [[nodiscard]] bool is_top() const { return kind == Kind::Top; }

    friend bool operator==(const CcpFormula& x, const CcpFormula& y) {
        if (x.kind != y.kind) return false;
        switch (x.kind) {
        case Kind::Const: return x.value == y.value;
        case Kind::Copy: return x.src == y.src;
        default: return true;
        }
    }
};

class CcpFunction {
  public:
    static CcpFunction identity(std::size_t nvars) {
        CcpFunction f;
        for (std::size_t i = 0; i < nvars; ++i) f.out_.push_back(CcpFormula::copy(static_cast<int>(i)));
        return f;
    }
    static CcpFunction bot(std::size_t nvars) {
        CcpFunction f = identity(nvars);
        f.bot_ = true;
        return f;
    }
    static CcpFunction of(std::vector<CcpFormula> out) {
        CcpFunction f;
        f.out_ = std::move(out);
        return f;
    }

    [[nodiscard]] bool is_bot() const { return bot_; }
    [[nodiscard]] std::size_t size() const { return out_.size(); }
    [[nodiscard]] const CcpFormula& operator[](std::size_t v) const { return out_[v]; }
    [[nodiscard]] const std::vector<CcpFormula>& formulas() const { return out_; }
    void set(std::size_t v, CcpFormula f) { out_[v] = std::move(f); }

    friend bool operator==(const CcpFunction& x, const CcpFunction& y) {
        if (x.bot_ != y.bot_) return false;
        return x.bot_ ? x.out_.size() == y.out_.size() : x.out_ == y.out_;
    }

  private:
    bool bot_ = false;
    std::vector<CcpFormula> out_;
};

inline LcpFormula to_lcp(const CcpFormula& f) {
    switch (f.kind) {
    case CcpFormula::Kind::Const: return LcpFormula::constant(f.value);
    case CcpFormula::Kind::Copy: return LcpFormula::copy(f.src);
    default: return LcpFormula::top();
    }
}

inline LcpFunction to_lcp(const CcpFunction& f) {
    if (f.is_bot()) return LcpFunction::bot(f.size());
    std::vector<LcpFormula> out;
    out.reserve(f.size());
    for (const auto& fv : f.formulas()) out.push_back(to_lcp(fv));
    return LcpFunction::of(std::move(out));
}

inline CcpFunction ccp_compose(const CcpFunction& f, const CcpFunction& g) {
    check_universe(f.size(), g.size());
    if (f.is_bot() || g.is_bot()) return CcpFunction::bot(f.size());
    std::vector<CcpFormula> out;
    out.reserve(g.size());
    for (const auto& gv : g.formulas())
        out.push_back(gv.kind == CcpFormula::Kind::Copy ? f[static_cast<std::size_t>(gv.src)] : gv);
    return CcpFunction::of(std::move(out));
}

inline CcpFunction ccp_join(const CcpFunction& f, const CcpFunction& g) {
    check_universe(f.size(), g.size());
    if (f.is_bot()) return g;
    if (g.is_bot()) return f;
    CcpFunction out = f;
    for (std::size_t v = 0; v < f.size(); ++v)
        if (!(f[v] == g[v])) out.set(v, CcpFormula::top());
    return out;
}

inline bool ccp_leq(const CcpFunction& f, const CcpFunction& g) {
    check_universe(f.size(), g.size());
    if (f.is_bot()) return true;
    if (g.is_bot()) return false;
    for (std::size_t v = 0; v < f.size(); ++v)
        if (!g[v].is_top() && !(f[v] == g[v])) return false;
    return true;
}

inline CpEnv ccp_apply(const CcpFunction& f, const CpEnv& env) { return lcp_apply(to_lcp(f), env); }

inline bool ccp_dominated(const CcpFunction& f, const std::vector<const CcpFunction*>& set) {
    std::vector<LcpFunction> lifted;
    lifted.reserve(set.size());
    for (const auto* g : set) lifted.push_back(to_lcp(*g));
    std::vector<const LcpFunction*> ptrs;
    ptrs.reserve(lifted.size());
    for (const auto& g : lifted) ptrs.push_back(&g);
    return lcp_dominated(to_lcp(f), ptrs);
}

inline CcpFormula ccp_from_expr(const Expr& e) {
    auto lin = to_linear(e);
    if (!lin) return CcpFormula::top();
    if (lin->coeff.empty()) return CcpFormula::constant(lin->constant);
    if (lin->coeff.size() == 1 && lin->coeff.begin()->second == 1 && lin->constant == 0)
        return CcpFormula::copy(lin->coeff.begin()->first);
    return CcpFormula::top();
}

inline CcpFunction ccp_from_action(const Action& action, std::size_t nvars) {
    CcpFunction f = CcpFunction::identity(nvars);
    for (const auto& st : action.stmts) {
        const auto* a = std::get_if<Assign>(&st);
        if (!a) continue;
        CcpFunction step = CcpFunction::identity(nvars);
        step.set(static_cast<std::size_t>(a->var), ccp_from_expr(*a->rhs));
        f = ccp_compose(f, step);
    }
    return f;
}

inline std::string render(const CcpFunction& f, const std::vector<std::string>& names) {
    return render(to_lcp(f), names);
}

} // namespace dfas
