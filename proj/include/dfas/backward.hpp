#pragma once

// Backward engine: grows paths backwards from a target node, pruning a path
// when the retained paths at its start node with no larger demand already
// dominate its transfer function. Procedure calls are crossed with
// entry-to-exit summaries kept up to supply-covering.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dfas/attach.hpp"
#include "dfas/lattice.hpp"
#include "dfas/vcfg.hpp"

namespace dfas {

using Vec = std::vector<std::int64_t>;

class AnalysisAbort : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline Vec zero_vec(std::size_t r) { return Vec(r, 0); }

inline bool vec_leq(const Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

// max(d - w, 0)
inline Vec demand_step(const Vec& d, const std::vector<int>& w) {
    Vec out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = std::max<std::int64_t>(d[i] - w[i], 0);
    return out;
}

// Demand of a path given by its queuing vectors, seeded with d at its end.
inline Vec demand(const std::vector<std::vector<int>>& path, Vec d) {
    for (auto it = path.rbegin(); it != path.rend(); ++it) d = demand_step(d, *it);
    return d;
}

// min(sum of vectors, d); the path must not receive.
inline Vec supply(const std::vector<std::vector<int>>& path, const Vec& d) {
    Vec sum(d.size(), 0);
    for (const auto& w : path)
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (w[i] < 0) throw std::invalid_argument("supply of a path with a receive");
            sum[i] += w[i];
        }
    for (std::size_t i = 0; i < d.size(); ++i) sum[i] = std::min(sum[i], d[i]);
    return sum;
}

inline std::string render_vec(const Vec& v) {
    std::string s = "⟨";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "⟩";
}

// Interprocedurally valid and complete entry-to-exit path of a procedure.
template <FunctionDomain D>
struct IvcPath {
    std::vector<std::string> nodes; // qualified "F:n" names, entry first
    typename D::Transfer ptf;
    Vec sum;
};

template <FunctionDomain D>
using IvcRef = std::shared_ptr<const IvcPath<D>>;

// Backward cons-list: first segment, then the shared suffix.
template <FunctionDomain D>
struct PathCell {
    int edge = -1; // VCFG edge; -1 for a call/summary/return segment
    IvcRef<D> summary;
    int call_edge = -1, return_edge = -1;
    std::shared_ptr<const PathCell> rest;
    int start = -1;
    Vec demand;
    typename D::Transfer ptf;
    std::size_t length = 0;
};

template <FunctionDomain D>
using PathRef = std::shared_ptr<const PathCell<D>>;

struct TraceEvent {
    enum class Kind { Retained, Rejected, SummaryRetained, SummaryRejected };
    Kind kind = Kind::Retained;
    std::string procedure; // summaries only
    std::string path;
    Vec measure; // demand, or supply for summaries
    std::string ptf;
    std::vector<std::string> cover;
};

inline const char* to_string(TraceEvent::Kind k) {
    switch (k) {
    case TraceEvent::Kind::Retained: return "retained";
    case TraceEvent::Kind::Rejected: return "rejected";
    case TraceEvent::Kind::SummaryRetained: return "summary-retained";
    default: return "summary-rejected";
    }
}

struct BackwardOptions {
    std::size_t max_paths = 2000000;
    bool trace = false;
    std::size_t threads = 1;
};

struct BackwardStats {
    std::size_t retained = 0;
    std::size_t rejected = 0;
    std::size_t extended = 0;
    std::size_t summaries = 0;

    BackwardStats& operator+=(const BackwardStats& o) {
        retained += o.retained;
        rejected += o.rejected;
        extended += o.extended;
        summaries += o.summaries;
        return *this;
    }
};

template <FunctionDomain D>
class BackwardEngine {
  public:
    using T = typename D::Transfer;

    explicit BackwardEngine(const AttachedGraph<D>& ag, BackwardOptions opt = {}) : ag_(ag), opt_(opt) {
        const Vcfg& g = ag_.g();
        for (const auto& f : g.procedures) templates_[f.name] = enumerate_templates(f);
    }

    // Retained entry-to-exit paths of `proc` for supply bound d.
    const std::vector<IvcRef<D>>& end_to_end(const std::string& proc, const Vec& d) {
        auto it = memo_.find(d);
        if (it == memo_.end()) it = compute_end_to_end(d);
        return it->second.at(proc);
    }

    // Join over feasible paths from the start node to `target` applied to d0.
    CpEnv jofp(int target, const CpEnv& d0) {
        const Vcfg& g = ag_.g();
        paths_.assign(g.num_nodes(), {});
        rises_.assign(g.num_nodes(), 0);
        worklist_.clear();
        target_ = target;

        extend(target, nullptr);
        while (!worklist_.empty()) {
            PathRef<D> p = worklist_.front();
            worklist_.pop_front();
            ++stats.extended;
            extend(p->start, p);
        }

        CpEnv result = CpEnv::bottom(g.nvars());
        if (target == g.start) result = d0;
        for (const auto& p : paths_[static_cast<std::size_t>(g.start)])
            if (std::all_of(p->demand.begin(), p->demand.end(), [](auto x) { return x == 0; }))
                result = cp_join(result, D::apply(p->ptf, d0));
        return result;
    }

    [[nodiscard]] const std::vector<PathRef<D>>& paths_at(int node) const {
        return paths_[static_cast<std::size_t>(node)];
    }

    // Node ids along the path, space separated.
    [[nodiscard]] std::string render_path(const PathCell<D>* p) const {
        const Vcfg& g = ag_.g();
        std::string s = g.ids[static_cast<std::size_t>(p->start)];
        for (; p; p = p->rest.get()) {
            if (p->edge >= 0) {
                s += " " + g.ids[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(p->edge)].to)];
                continue;
            }
            int site = g.edges[static_cast<std::size_t>(p->call_edge)].from;
            for (const auto& n : p->summary->nodes) s += " " + g.instance_id(site, n);
            s += " " + g.ids[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(p->return_edge)].to)];
        }
        return s;
    }

    [[nodiscard]] std::size_t watchdog_limit() const {
        std::size_t v = ag_.g().nvars();
        return std::max(4 * v + 8, v * (2 * v + 4) + 8);
    }

    BackwardStats stats;
    std::vector<TraceEvent> trace;

  private:
    struct Segment {
        const BodyEdge* edge;
        T f; // intra segments only
    };
    using Template = std::vector<Segment>;

    std::vector<Template> enumerate_templates(const ProcBody& f) const {
        std::map<std::string, std::vector<const BodyEdge*>> succ;
        for (const auto& e : f.edges) succ[e.from].push_back(&e);
        std::vector<Template> out;
        Template cur;
        std::function<void(const std::string&)> dfs = [&](const std::string& n) {
            if (n == f.exit) {
                out.push_back(cur);
                return;
            }
            if (cur.size() > f.edges.size()) throw AnalysisAbort("procedure " + f.name + " contains a loop");
            for (const auto* e : succ[n]) {
                cur.push_back({e, e->call ? D::identity(ag_.g().nvars()) : D::lift(e->action, ag_.g().nvars())});
                dfs(e->to);
                cur.pop_back();
            }
        };
        dfs(f.entry);
        return out;
    }

    static std::size_t holes(const Template& t) {
        return static_cast<std::size_t>(
            std::count_if(t.begin(), t.end(), [](const Segment& s) { return s.edge->call.has_value(); }));
    }

    IvcPath<D> instantiate(const ProcBody& f, const Template& t, const std::vector<IvcRef<D>>& fill) const {
        const Vcfg& g = ag_.g();
        IvcPath<D> p{{f.entry}, D::identity(g.nvars()), zero_vec(g.r())};
        std::size_t h = 0;
        for (const auto& seg : t) {
            if (seg.edge->call) {
                const auto& q = *fill[h++];
                p.nodes.insert(p.nodes.end(), q.nodes.begin(), q.nodes.end());
                p.ptf = D::compose(p.ptf, q.ptf);
                for (std::size_t i = 0; i < p.sum.size(); ++i) p.sum[i] += q.sum[i];
            } else {
                p.ptf = D::compose(p.ptf, seg.f);
                for (std::size_t i = 0; i < p.sum.size(); ++i) p.sum[i] += seg.edge->w[i];
            }
            p.nodes.push_back(seg.edge->to);
        }
        return p;
    }

    static Vec clamp(const Vec& sum, const Vec& d) {
        Vec s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s[i] = std::min(sum[i], d[i]);
        return s;
    }

    std::string render_ivc(const IvcPath<D>& p) const {
        std::string s;
        for (const auto& n : p.nodes) s += (s.empty() ? "" : " ") + n;
        return s;
    }

    bool try_add_summary(const std::string& proc, std::vector<IvcRef<D>>& set, IvcPath<D> p, const Vec& d) {
        Vec sp = clamp(p.sum, d);
        std::vector<const T*> cover;
        std::vector<const IvcPath<D>*> members;
        for (const auto& q : set)
            if (vec_leq(sp, clamp(q->sum, d))) {
                cover.push_back(&q->ptf);
                members.push_back(q.get());
            }
        bool covered = D::dominated(p.ptf, cover);
        if (opt_.trace) {
            TraceEvent ev{covered ? TraceEvent::Kind::SummaryRejected : TraceEvent::Kind::SummaryRetained, proc,
                          render_ivc(p), sp, D::render(p.ptf, ag_.g().var_names), {}};
            if (covered)
                for (const auto* q : members) ev.cover.push_back(render_ivc(*q));
            trace.push_back(std::move(ev));
        }
        if (covered) return false;
        set.push_back(std::make_shared<const IvcPath<D>>(std::move(p)));
        if (++stats.summaries > opt_.max_paths)
            throw AnalysisAbort("procedure summary cap of " + std::to_string(opt_.max_paths) + " paths exceeded");
        return true;
    }

    auto compute_end_to_end(const Vec& d) {
        const Vcfg& g = ag_.g();
        std::map<std::string, std::vector<IvcRef<D>>> sets;
        std::map<std::string, std::vector<std::vector<std::size_t>>> watermark;
        for (const auto& f : g.procedures) {
            sets[f.name];
            const auto& ts = templates_.at(f.name);
            watermark[f.name].resize(ts.size());
            for (std::size_t i = 0; i < ts.size(); ++i) watermark[f.name][i].assign(holes(ts[i]), 0);
        }
        for (const auto& f : g.procedures)
            for (const auto& t : templates_.at(f.name))
                if (holes(t) == 0) try_add_summary(f.name, sets[f.name], instantiate(f, t, {}), d);

        bool added = true;
        while (added) {
            added = false;
            for (const auto& f : g.procedures) {
                const auto& ts = templates_.at(f.name);
                for (std::size_t ti = 0; ti < ts.size(); ++ti) {
                    const auto& t = ts[ti];
                    std::size_t nh = holes(t);
                    if (nh == 0) continue;
                    std::vector<const std::vector<IvcRef<D>>*> callee;
                    for (const auto& seg : t)
                        if (seg.edge->call) callee.push_back(&sets.at(*seg.edge->call));
                    std::vector<std::size_t> size(nh);
                    bool empty = false;
                    for (std::size_t h = 0; h < nh; ++h) {
                        size[h] = callee[h]->size();
                        empty = empty || size[h] == 0;
                    }
                    auto& wm = watermark[f.name][ti];
                    if (!empty) {
                        std::vector<std::size_t> idx(nh, 0);
                        for (;;) {
                            bool fresh = false;
                            for (std::size_t h = 0; h < nh; ++h) fresh = fresh || idx[h] >= wm[h];
                            if (fresh) {
                                std::vector<IvcRef<D>> fill(nh);
                                for (std::size_t h = 0; h < nh; ++h) fill[h] = (*callee[h])[idx[h]];
                                if (try_add_summary(f.name, sets[f.name], instantiate(f, t, fill), d)) added = true;
                            }
                            std::size_t h = 0;
                            while (h < nh && ++idx[h] == size[h]) idx[h++] = 0;
                            if (h == nh) break;
                        }
                    }
                    wm = size;
                }
            }
        }
        return memo_.emplace(d, std::move(sets)).first;
    }

    void consider(PathCell<D> cell) {
        auto& here = paths_[static_cast<std::size_t>(cell.start)];
        std::vector<const T*> cover;
        std::vector<const PathCell<D>*> members;
        for (const auto& q : here)
            if (vec_leq(q->demand, cell.demand)) {
                cover.push_back(&q->ptf);
                members.push_back(q.get());
            }
        bool covered = D::dominated(cell.ptf, cover);
        if (opt_.trace) {
            TraceEvent ev{covered ? TraceEvent::Kind::Rejected : TraceEvent::Kind::Retained, "", render_path(&cell),
                          cell.demand, D::render(cell.ptf, ag_.g().var_names), {}};
            if (covered)
                for (const auto* q : members) ev.cover.push_back(render_path(q));
            trace.push_back(std::move(ev));
        }
        if (covered) {
            ++stats.rejected;
            return;
        }
        // Watchdog: count retained paths that strictly raise the node's join.
        if (cover.size() != here.size()) {
            cover.clear();
            for (const auto& q : here) cover.push_back(&q->ptf);
        }
        if (!D::dominated(cell.ptf, cover) && ++rises_[static_cast<std::size_t>(cell.start)] > watchdog_limit())
            throw AnalysisAbort("join at node " + ag_.g().ids[static_cast<std::size_t>(cell.start)] +
                                " kept rising; transfer-function lattice does not appear to have finite height");
        auto ref = std::make_shared<const PathCell<D>>(std::move(cell));
        here.push_back(ref);
        worklist_.push_back(ref);
        if (++stats.retained > opt_.max_paths)
            throw AnalysisAbort("path cap of " + std::to_string(opt_.max_paths) + " retained paths exceeded");
    }

    void extend(int v1, const PathRef<D>& rest) {
        const Vcfg& g = ag_.g();
        Vec d = rest ? rest->demand : zero_vec(g.r());
        T ptf = rest ? rest->ptf : D::identity(g.nvars());
        std::size_t len = rest ? rest->length : 0;
        const auto& incoming = g.in[static_cast<std::size_t>(v1)];

        for (int ei : incoming) {
            const auto& ret = g.edges[static_cast<std::size_t>(ei)];
            if (ret.kind != EdgeKind::Return) continue;
            const auto& call = g.edges[static_cast<std::size_t>(ret.partner)];
            const auto& set = end_to_end(ret.procedure, d);
            for (const auto& q : set) {
                PathCell<D> c;
                c.summary = q;
                c.call_edge = ret.partner;
                c.return_edge = ei;
                c.rest = rest;
                c.start = call.from;
                c.demand = d;
                for (std::size_t i = 0; i < d.size(); ++i) c.demand[i] = std::max<std::int64_t>(d[i] - q->sum[i], 0);
                c.ptf = D::compose(ag_.f(ret.partner), D::compose(q->ptf, D::compose(ag_.f(ei), ptf)));
                c.length = len + q->nodes.size() + 1;
                consider(std::move(c));
            }
        }
        for (int ei : incoming) {
            const auto& e = g.edges[static_cast<std::size_t>(ei)];
            if (e.kind == EdgeKind::Return) continue;
            PathCell<D> c;
            c.edge = ei;
            c.rest = rest;
            c.start = e.from;
            c.demand = demand_step(d, e.w);
            c.ptf = D::compose(ag_.f(ei), ptf);
            c.length = len + 1;
            consider(std::move(c));
        }
    }

    const AttachedGraph<D>& ag_;
    BackwardOptions opt_;
    std::map<std::string, std::vector<Template>> templates_;
    std::map<Vec, std::map<std::string, std::vector<IvcRef<D>>>> memo_;
    std::vector<std::vector<PathRef<D>>> paths_;
    std::vector<std::size_t> rises_;
    std::deque<PathRef<D>> worklist_;
    int target_ = -1;
};

template <FunctionDomain D>
struct BackwardResult {
    CpEnv value;
    BackwardStats stats;
    std::vector<TraceEvent> trace;
};

// Joined JOFP over a target set. With threads > 1 the target nodes are
// analyzed concurrently, each by its own engine; results are joined in node
// order so the outcome does not depend on scheduling.
template <FunctionDomain D>
BackwardResult<D> backward_jofp(const AttachedGraph<D>& ag, const std::vector<int>& targets, const CpEnv& d0,
                                const BackwardOptions& opt = {}) {
    std::vector<BackwardResult<D>> parts(targets.size());
    std::vector<std::exception_ptr> errors(targets.size());
    auto run = [&](std::size_t i) {
        try {
            BackwardEngine<D> eng(ag, opt);
            parts[i].value = eng.jofp(targets[i], d0);
            parts[i].stats = eng.stats;
            parts[i].trace = std::move(eng.trace);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    std::size_t nthreads = std::max<std::size_t>(1, std::min(opt.threads, targets.size()));
    if (nthreads == 1) {
        for (std::size_t i = 0; i < targets.size(); ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < nthreads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < targets.size(); i += nthreads) run(i);
            });
        for (auto& th : pool) th.join();
    }
    BackwardResult<D> out{CpEnv::bottom(ag.g().nvars()), {}, {}};
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.value = cp_join(out.value, parts[i].value);
        out.stats += parts[i].stats;
        for (auto& ev : parts[i].trace) out.trace.push_back(std::move(ev));
    }
    return out;
}

} // namespace dfas
