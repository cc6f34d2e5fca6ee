#pragma once

// Domain policies. Every engine works over CpEnv values; a policy says how an
// edge action becomes a transfer and how a transfer acts on a value. Function
// domains additionally expose the algebra the backward engine needs.

#include <concepts>
#include <string>
#include <string_view>
#include <vector>

#include "dfas/ccp.hpp"
#include "dfas/cp.hpp"
#include "dfas/lcp.hpp"

namespace dfas {

template <class D>
concept ValueDomain = requires(const typename D::Transfer& f, const CpEnv& env, const Action& a, std::size_t n) {
    { D::name } -> std::convertible_to<std::string_view>;
    { D::lift(a, n) } -> std::same_as<typename D::Transfer>;
    { D::apply(f, env) } -> std::same_as<CpEnv>;
};

template <class D>
concept FunctionDomain =
    ValueDomain<D> &&
    requires(const typename D::Transfer& f, const std::vector<const typename D::Transfer*>& set, std::size_t n,
             const std::vector<std::string>& names) {
        { D::identity(n) } -> std::same_as<typename D::Transfer>;
        { D::compose(f, f) } -> std::same_as<typename D::Transfer>;
        { D::join(f, f) } -> std::same_as<typename D::Transfer>;
        { D::leq(f, f) } -> std::same_as<bool>;
        { D::dominated(f, set) } -> std::same_as<bool>;
        { D::render(f, names) } -> std::same_as<std::string>;
    };

// Full constant propagation keeps the action and evaluates it directly.
struct CpTransfer {
    Action action;
    std::size_t nvars = 0;
};

struct CpDomain {
    using Transfer = CpTransfer;
    static constexpr std::string_view name = "cp";
    static Transfer lift(const Action& a, std::size_t n) { return {a, n}; }
    static CpEnv apply(const Transfer& f, const CpEnv& env) { return cp_transfer(f.action, env); }
};

struct LcpDomain {
    using Transfer = LcpFunction;
    static constexpr std::string_view name = "lcp";
    static Transfer lift(const Action& a, std::size_t n) { return lcp_from_action(a, n); }
    static CpEnv apply(const Transfer& f, const CpEnv& env) { return lcp_apply(f, env); }
    static Transfer identity(std::size_t n) { return LcpFunction::identity(n); }
    static Transfer bottom(std::size_t n) { return LcpFunction::bot(n); }
    static Transfer compose(const Transfer& f, const Transfer& g) { return lcp_compose(f, g); }
    static Transfer join(const Transfer& f, const Transfer& g) { return lcp_join(f, g); }
    static bool leq(const Transfer& f, const Transfer& g) { return lcp_leq(f, g); }
    static bool dominated(const Transfer& f, const std::vector<const Transfer*>& set) { return lcp_dominated(f, set); }
    static std::string render(const Transfer& f, const std::vector<std::string>& names) {
        return dfas::render(f, names);
    }
};

struct CcpDomain {
    using Transfer = CcpFunction;
    static constexpr std::string_view name = "ccp";
    static Transfer lift(const Action& a, std::size_t n) { return ccp_from_action(a, n); }
    static CpEnv apply(const Transfer& f, const CpEnv& env) { return ccp_apply(f, env); }
    static Transfer identity(std::size_t n) { return CcpFunction::identity(n); }
    static Transfer bottom(std::size_t n) { return CcpFunction::bot(n); }
    static Transfer compose(const Transfer& f, const Transfer& g) { return ccp_compose(f, g); }
    static Transfer join(const Transfer& f, const Transfer& g) { return ccp_join(f, g); }
    static bool leq(const Transfer& f, const Transfer& g) { return ccp_leq(f, g); }
    static bool dominated(const Transfer& f, const std::vector<const Transfer*>& set) { return ccp_dominated(f, set); }
    static std::string render(const Transfer& f, const std::vector<std::string>& names) {
        return dfas::render(f, names);
    }
};

static_assert(ValueDomain<CpDomain>);
static_assert(FunctionDomain<LcpDomain>);
static_assert(FunctionDomain<CcpDomain>);

// Fold of edge transfers in path order; throws DomainMismatch when the
// transfers disagree on the variable universe.
template <FunctionDomain D, class Range>
typename D::Transfer ptf_of(const Range& transfers, std::size_t nvars) {
    auto acc = D::identity(nvars);
    for (const auto& f : transfers) {
        check_universe(nvars, f.size());
        acc = D::compose(acc, f);
    }
    return acc;
}

} // namespace dfas
