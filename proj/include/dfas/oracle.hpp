#pragma once

// Bounded enumeration of feasible paths, for testing the engines.
//
// Breadth-first by length over (node, counters, call stack). A new value at
// such a key is dropped when it is below everything already seen there. For
// distributive transfers (LCP, CCP) this loses nothing within the length
// bound; for full CP it can under-approximate.

#include <map>
#include <tuple>
#include <vector>

#include "dfas/attach.hpp"
#include "dfas/lattice.hpp"

namespace dfas {

struct OracleOptions {
    std::size_t max_len = 48;
    std::size_t window = 10;
    std::size_t max_stack = 8; // call depth cap when the graph has procedures
};

struct EnumerationResult {
    std::vector<CpEnv> values;
    bool saturated = false;
    std::size_t visited = 0;
};

template <ValueDomain D>
EnumerationResult enumerate_jofp(const AttachedGraph<D>& ag, const CpEnv& d0, const OracleOptions& opt = {}) {
    const Vcfg& g = ag.g();
    using Key = std::tuple<int, std::vector<int>, std::vector<int>>; // node, counters, pending calls
    std::map<Key, CpEnv> seen;
    std::map<Key, CpEnv> frontier;
    std::vector<CpEnv> values(g.num_nodes(), CpEnv::bottom(g.nvars()));
    EnumerationResult res;

    auto record = [&](std::map<Key, CpEnv>& into, Key key, const CpEnv& v) {
        if (!v.reachable()) return;
        auto it = seen.find(key);
        if (it != seen.end() && cp_leq(v, it->second)) return;
        if (it == seen.end()) seen.emplace(key, v);
        else it->second = cp_join(it->second, v);
        auto& slot = values[static_cast<std::size_t>(std::get<0>(key))];
        slot = cp_join(slot, v);
        auto [f, fresh] = into.emplace(std::move(key), v);
        if (!fresh) f->second = cp_join(f->second, v);
    };
    record(frontier, Key{g.start, std::vector<int>(g.r(), 0), {}}, d0);

    std::vector<CpEnv> snapshot;
    std::size_t total = opt.max_len + opt.window;
    for (std::size_t len = 0; len < total && !frontier.empty(); ++len) {
        if (len == opt.max_len) snapshot = values;
        std::map<Key, CpEnv> next;
        for (const auto& [key, v] : frontier) {
            ++res.visited;
            const auto& [node, counters, stack] = key;
            for (int ei : g.out[static_cast<std::size_t>(node)]) {
                const auto& e = g.edges[static_cast<std::size_t>(ei)];
                auto c = counters;
                bool ok = true;
                for (std::size_t i = 0; i < c.size(); ++i) {
                    c[i] += e.w[i];
                    ok = ok && c[i] >= 0;
                }
                if (!ok) continue;
                auto st = stack;
                if (e.kind == EdgeKind::Call) {
                    if (st.size() >= opt.max_stack) continue;
                    st.push_back(ei);
                } else if (e.kind == EdgeKind::Return) {
                    if (st.empty() || st.back() != e.partner) continue;
                    st.pop_back();
                }
                record(next, Key{e.to, std::move(c), std::move(st)}, D::apply(ag.f(ei), v));
            }
        }
        frontier = std::move(next);
    }
    if (snapshot.empty()) snapshot = values; // frontier died out before max_len
    res.saturated = snapshot == values;
    res.values = std::move(snapshot);
    return res;
}

} // namespace dfas
