#pragma once

// Forward engine: Kildall iteration where each node carries a map from
// bounded queue configurations ([0..theta]^r, theta meaning "theta or more")
// to CP values. Also the counter-blind baseline.

#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfas/attach.hpp"
#include "dfas/backward.hpp"
#include "dfas/lattice.hpp"

namespace dfas {

using Config = std::vector<int>;

// Membership of (p, q, s) in the single-counter bounded-move relation.
inline bool bm_member(int p, int q, int s, int theta) {
    if (p < 0 || p > theta || s < 0 || s > theta) return false;
    if (q >= 0) {
        if (p + q <= theta) return s == p + q;
        return s == theta;
    }
    if (p == theta) return theta - s <= -q;
    return p + q >= 0 && s == p + q;
}

namespace detail {

template <class PerComponent>
std::vector<Config> product(std::size_t r, PerComponent&& options) {
    std::vector<Config> out{Config{}};
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Config> next;
        for (const auto& prefix : out)
            for (int v : options(i)) {
                auto c = prefix;
                c.push_back(v);
                next.push_back(std::move(c));
            }
        out = std::move(next);
    }
    return out;
}

} // namespace detail

// All c1 with (c1, w, c2) in the relation.
inline std::vector<Config> bm_preds(const Config& c2, const std::vector<int>& w, int theta) {
    return detail::product(c2.size(), [&](std::size_t i) {
        std::vector<int> ps;
        for (int p = 0; p <= theta; ++p)
            if (bm_member(p, w[i], c2[i], theta)) ps.push_back(p);
        return ps;
    });
}

// All c2 with (c1, w, c2) in the relation; the direction the engine iterates.
inline std::vector<Config> bm_succs(const Config& c1, const std::vector<int>& w, int theta) {
    return detail::product(c1.size(), [&](std::size_t i) {
        std::vector<int> ss;
        int p = c1[i], q = w[i];
        if (q >= 0) {
            ss.push_back(std::min(p + q, theta));
        } else if (p == theta) {
            for (int s = std::max(0, theta + q); s <= theta; ++s) ss.push_back(s);
        } else if (p + q >= 0) {
            ss.push_back(p + q);
        }
        return ss;
    });
}

// Absent configurations map to bottom.
class QueueConfigMap {
  public:
    [[nodiscard]] const std::map<Config, CpEnv>& slots() const { return slots_; }
    [[nodiscard]] bool empty() const { return slots_.empty(); }

    [[nodiscard]] CpEnv at(const Config& c, std::size_t nvars) const {
        auto it = slots_.find(c);
        return it == slots_.end() ? CpEnv::bottom(nvars) : it->second;
    }

    void join_at(const Config& c, const CpEnv& v) {
        if (!v.reachable()) return;
        auto [it, fresh] = slots_.emplace(c, v);
        if (!fresh) it->second = cp_join(it->second, v);
    }

    friend bool operator==(const QueueConfigMap&, const QueueConfigMap&) = default;

  private:
    std::map<Config, CpEnv> slots_;
};

inline QueueConfigMap qcm_join(const QueueConfigMap& a, const QueueConfigMap& b) {
    QueueConfigMap out = a;
    for (const auto& [c, v] : b.slots()) out.join_at(c, v);
    return out;
}

inline QueueConfigMap qcm_widen(const QueueConfigMap& older, const QueueConfigMap& newer) {
    QueueConfigMap out;
    for (const auto& [c, v] : older.slots()) out.join_at(c, v);
    for (const auto& [c, v] : newer.slots()) {
        auto it = older.slots().find(c);
        out.join_at(c, it == older.slots().end() ? v : cp_widen(it->second, v));
    }
    return out;
}

inline bool qcm_leq(const QueueConfigMap& a, const QueueConfigMap& b) {
    for (const auto& [c, v] : a.slots()) {
        auto it = b.slots().find(c);
        if (it == b.slots().end() ? v.reachable() : !cp_leq(v, it->second)) return false;
    }
    return true;
}

inline CpEnv joinmap(const QueueConfigMap& m, std::size_t nvars) {
    CpEnv out = CpEnv::bottom(nvars);
    for (const auto& [c, v] : m.slots()) out = cp_join(out, v);
    return out;
}

template <ValueDomain D>
QueueConfigMap fun_edge(const typename D::Transfer& f, const std::vector<int>& w, const QueueConfigMap& l, int theta) {
    QueueConfigMap out;
    for (const auto& [c1, v] : l.slots()) {
        CpEnv fv = D::apply(f, v);
        if (!fv.reachable()) continue;
        for (const auto& c2 : bm_succs(c1, w, theta)) out.join_at(c2, fv);
    }
    return out;
}

inline std::string render(const QueueConfigMap& m, const std::vector<std::string>& names) {
    std::string s;
    for (const auto& [c, v] : m.slots()) {
        std::vector<std::int64_t> cv(c.begin(), c.end());
        s += render_vec(cv) + " ↦ " + render(v, names) + "\n";
    }
    return s;
}

struct ForwardOptions {
    int theta = 2;
    std::size_t max_iters = 10000000;
};

struct ForwardStats {
    std::size_t iterations = 0;
    std::size_t slots = 0;
};

struct ForwardResult {
    std::vector<QueueConfigMap> maps;
    ForwardStats stats;

    [[nodiscard]] CpEnv at(int node, std::size_t nvars) const {
        return joinmap(maps[static_cast<std::size_t>(node)], nvars);
    }
};

inline void require_flat(const Vcfg& g, const char* engine) {
    if (g.has_procedures())
        throw std::invalid_argument(std::string(engine) + " engine unsupported: procedures present");
}

template <ValueDomain D>
ForwardResult forward_analyze(const AttachedGraph<D>& ag, const CpEnv& d0, const ForwardOptions& opt = {}) {
    const Vcfg& g = ag.g();
    require_flat(g, "forward");
    if (opt.theta < 0) throw std::invalid_argument("theta must be non-negative");
    ForwardResult res;
    res.maps.resize(g.num_nodes());
    std::vector<bool> visited(g.num_nodes(), false), queued(g.num_nodes(), false);
    res.maps[static_cast<std::size_t>(g.start)].join_at(Config(g.r(), 0), d0);
    visited[static_cast<std::size_t>(g.start)] = true;
    std::deque<int> work{g.start};
    queued[static_cast<std::size_t>(g.start)] = true;
    while (!work.empty()) {
        int n = work.front();
        work.pop_front();
        queued[static_cast<std::size_t>(n)] = false;
        if (++res.stats.iterations > opt.max_iters)
            throw AnalysisAbort("forward iteration cap of " + std::to_string(opt.max_iters) + " exceeded");
        for (int ei : g.out[static_cast<std::size_t>(n)]) {
            const auto& e = g.edges[static_cast<std::size_t>(ei)];
            auto m = static_cast<std::size_t>(e.to);
            auto incoming = fun_edge<D>(ag.f(ei), e.w, res.maps[static_cast<std::size_t>(n)], opt.theta);
            auto joined = qcm_join(res.maps[m], incoming);
            auto next = visited[m] ? qcm_widen(res.maps[m], joined) : joined;
            visited[m] = true;
            if (next == res.maps[m]) continue;
            res.maps[m] = std::move(next);
            if (!queued[m]) {
                queued[m] = true;
                work.push_back(e.to);
            }
        }
    }
    for (const auto& m : res.maps) res.stats.slots += m.slots().size();
    return res;
}

struct JopResult {
    std::vector<CpEnv> values;
    std::size_t iterations = 0;
};

// Counter-blind fixpoint: every path counts, feasible or not.
template <ValueDomain D>
JopResult jop_analyze(const AttachedGraph<D>& ag, const CpEnv& d0, std::size_t max_iters = 10000000) {
    const Vcfg& g = ag.g();
    require_flat(g, "jop");
    JopResult res;
    res.values.assign(g.num_nodes(), CpEnv::bottom(g.nvars()));
    std::vector<bool> queued(g.num_nodes(), false);
    res.values[static_cast<std::size_t>(g.start)] = d0;
    std::deque<int> work{g.start};
    queued[static_cast<std::size_t>(g.start)] = true;
    while (!work.empty()) {
        int n = work.front();
        work.pop_front();
        queued[static_cast<std::size_t>(n)] = false;
        if (++res.iterations > max_iters)
            throw AnalysisAbort("jop iteration cap of " + std::to_string(max_iters) + " exceeded");
        for (int ei : g.out[static_cast<std::size_t>(n)]) {
            const auto& e = g.edges[static_cast<std::size_t>(ei)];
            auto m = static_cast<std::size_t>(e.to);
            auto next = cp_widen(res.values[m], D::apply(ag.f(ei), res.values[static_cast<std::size_t>(n)]));
            if (next == res.values[m]) continue;
            res.values[m] = std::move(next);
            if (!queued[m]) {
                queued[m] = true;
                work.push_back(e.to);
            }
        }
    }
    return res;
}

} // namespace dfas
