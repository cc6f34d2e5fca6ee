#pragma once

#include <vector>

#include "dfas/lattice.hpp"
#include "dfas/vcfg.hpp"

namespace dfas {

// A VCFG whose edges carry transfers of domain D. Call and return edges get
// the identity transfer.
template <ValueDomain D>
struct AttachedGraph {
    const Vcfg* graph = nullptr;
    std::vector<typename D::Transfer> transfer;

    [[nodiscard]] const Vcfg& g() const { return *graph; }
    [[nodiscard]] const typename D::Transfer& f(int edge) const { return transfer[static_cast<std::size_t>(edge)]; }
};

template <ValueDomain D>
AttachedGraph<D> attach_domain(const Vcfg& g) {
    AttachedGraph<D> out;
    out.graph = &g;
    out.transfer.reserve(g.edges.size());
    for (const auto& e : g.edges) out.transfer.push_back(D::lift(e.action, g.nvars()));
    return out;
}

} // namespace dfas
