#pragma once

// VASS control-flow graph: product of process control states, one counter per
// sent (channel, message) pair. Procedure calls of the owning process appear
// as call/return edge pairs; while the owner is inside a procedure the other
// processes do not move.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfas/cp.hpp"
#include "dfas/model.hpp"

namespace dfas {

class CapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class EdgeKind { Intra, Call, Return };

inline const char* to_string(EdgeKind k) {
    switch (k) {
    case EdgeKind::Intra: return "intra";
    case EdgeKind::Call: return "call";
    default: return "return";
    }
}

struct VEdge {
    int from = -1, to = -1;
    EdgeKind kind = EdgeKind::Intra;
    Action action;
    std::string label;
    std::vector<int> w;
    int process = -1;      // process that moves
    int partner = -1;      // matching return (for a call) or call (for a return)
    std::string procedure; // callee for call/return; enclosing procedure for body edges
};

// A procedure body at CFG level; node names are qualified "F:n".
struct BodyEdge {
    std::string from, to;
    Action action;
    std::string label;
    std::vector<int> w;
    std::optional<std::string> call;
};

struct ProcBody {
    std::string name;
    std::string entry, exit;
    std::vector<std::string> nodes;
    std::vector<BodyEdge> edges;
};

struct Vcfg {
    std::vector<std::string> var_names;
    std::vector<Int> init;
    std::vector<std::string> process_names;
    std::vector<std::vector<std::string>> process_states; // includes "F:n" nodes for the owner
    std::vector<std::pair<std::string, std::string>> counters;
    std::optional<std::size_t> owner;
    std::vector<ProcBody> procedures;

    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> tuples;
    std::vector<VEdge> edges;
    std::vector<std::vector<int>> out, in;
    int start = 0;

    [[nodiscard]] std::size_t r() const { return counters.size(); }
    [[nodiscard]] std::size_t num_nodes() const { return ids.size(); }
    [[nodiscard]] std::size_t nvars() const { return var_names.size(); }

    [[nodiscard]] bool has_procedures() const {
        for (const auto& e : edges)
            if (e.kind != EdgeKind::Intra) return true;
        return false;
    }

    [[nodiscard]] int node(const std::string& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? -1 : it->second;
    }

    [[nodiscard]] CpEnv initial_env() const { return CpEnv::constants(init); }

    [[nodiscard]] const ProcBody* procedure(const std::string& name) const {
        for (const auto& f : procedures)
            if (f.name == name) return &f;
        return nullptr;
    }

    // Node id of `qualified` (an "F:n" name) in the context of `site`.
    [[nodiscard]] std::string instance_id(int site, const std::string& qualified) const {
        auto t = tuples[static_cast<std::size_t>(site)];
        t[owner ? *owner : 0] = qualified;
        std::string s;
        for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "|" : "") + t[i];
        return s;
    }

    // Builder interface, also used by tests to make graphs without a model.
    int add_node(const std::string& id, std::vector<std::string> tuple = {}) {
        auto [it, fresh] = index_.emplace(id, static_cast<int>(ids.size()));
        if (!fresh) return it->second;
        ids.push_back(id);
        tuples.push_back(tuple.empty() ? std::vector<std::string>{id} : std::move(tuple));
        out.emplace_back();
        in.emplace_back();
        return it->second;
    }

    int add_edge(VEdge e) {
        if (e.w.empty()) e.w.assign(r(), 0);
        int idx = static_cast<int>(edges.size());
        out[static_cast<std::size_t>(e.from)].push_back(idx);
        in[static_cast<std::size_t>(e.to)].push_back(idx);
        edges.push_back(std::move(e));
        return idx;
    }

  private:
    std::map<std::string, int> index_;
};

namespace detail {

inline std::string join_ids(const std::vector<std::string>& parts) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += "|";
        s += parts[i];
    }
    return s;
}

class VcfgBuilder {
  public:
    VcfgBuilder(const Model& m, std::size_t max_nodes) : m_(m), max_nodes_(max_nodes) {}

    Vcfg build() {
        if (m_.processes.empty()) throw ModelError("model declares no processes");
        g_.var_names = m_.var_names();
        for (const auto& v : m_.variables) g_.init.push_back(v.init);
        g_.owner = m_.procedure_owner();
        for (std::size_t i = 0; i < m_.processes.size(); ++i) {
            const auto& p = m_.processes[i];
            g_.process_names.push_back(p.name);
            auto states = p.states;
            if (g_.owner && *g_.owner == i)
                for (const auto& f : m_.procedures)
                    for (const auto& n : f.nodes) states.push_back(proc_node(f.name, n));
            g_.process_states.push_back(std::move(states));
        }

        std::set<std::pair<std::string, std::string>> sent;
        auto note = [&](const Transition& t) {
            if (auto s = t.action.send()) sent.insert({s->channel, s->message});
        };
        for (const auto& p : m_.processes)
            for (const auto& t : p.transitions) note(t);
        for (const auto& f : m_.procedures)
            for (const auto& t : f.edges) note(t);
        g_.counters.assign(sent.begin(), sent.end());
        for (std::size_t i = 0; i < g_.counters.size(); ++i) counter_[g_.counters[i]] = static_cast<int>(i);

        for (const auto& f : m_.procedures) {
            ProcBody b{f.name, proc_node(f.name, f.entry), proc_node(f.name, f.exit), {}, {}};
            for (const auto& n : f.nodes) b.nodes.push_back(proc_node(f.name, n));
            for (const auto& t : f.edges) {
                BodyEdge e{proc_node(f.name, t.from), proc_node(f.name, t.to), t.action, t.text, {}, t.call};
                e.w = t.call ? std::vector<int>(g_.r(), 0) : vector_of(t.action);
                b.edges.push_back(std::move(e));
            }
            g_.procedures.push_back(std::move(b));
        }

        std::vector<std::string> init;
        for (const auto& p : m_.processes) init.push_back(p.initial);
        g_.start = visit(init);

        while (!queue_.empty()) {
            int n = queue_.front();
            queue_.pop_front();
            expand(n);
        }
        return std::move(g_);
    }

  private:
    int visit(const std::vector<std::string>& tuple) {
        auto id = join_ids(tuple);
        int existing = g_.node(id);
        if (existing >= 0) return existing;
        if (g_.num_nodes() >= max_nodes_)
            throw CapExceeded("state-space cap of " + std::to_string(max_nodes_) + " nodes exceeded");
        int n = g_.add_node(id, tuple);
        queue_.push_back(n);
        return n;
    }

    std::vector<int> vector_of(const Action& a) {
        std::vector<int> w(g_.r(), 0);
        if (auto s = a.send()) w[static_cast<std::size_t>(counter_.at({s->channel, s->message}))] = 1;
        if (auto r = a.receive()) {
            auto it = counter_.find({r->channel, r->message});
            if (it == counter_.end())
                throw ModelError("message " + r->message + " on channel " + r->channel + " is received but never sent");
            w[static_cast<std::size_t>(it->second)] = -1;
        }
        return w;
    }

    void intra(int from, std::vector<std::string> tuple, const Transition& t, int proc, const std::string& body) {
        VEdge e;
        e.from = from;
        e.to = visit(tuple);
        e.action = t.action;
        e.label = t.text;
        e.w = vector_of(t.action);
        e.process = proc;
        e.procedure = body;
        g_.add_edge(std::move(e));
    }

    // Frozen context of a procedure instance: the tuple without the owner.
    std::string context_key(const std::vector<std::string>& tuple) const {
        auto t = tuple;
        t[*g_.owner] = "*";
        return join_ids(t);
    }

    void call(int from, const std::vector<std::string>& tuple, const Transition& t) {
        std::size_t o = *g_.owner;
        const Procedure* callee = m_.procedure(*t.call);
        auto entry = tuple;
        entry[o] = proc_node(callee->name, callee->entry);
        VEdge c;
        c.from = from;
        c.to = visit(entry);
        c.kind = EdgeKind::Call;
        c.label = "call " + callee->name;
        c.process = static_cast<int>(o);
        c.procedure = callee->name;
        int ci = g_.add_edge(std::move(c));
        auto site = tuple;
        site[o] = return_site_component(tuple[o], t.to);
        auto key = std::make_pair(callee->name, context_key(tuple));
        pending_[key].push_back({ci, site});
        if (auto it = exits_.find(key); it != exits_.end()) emit_return(it->second, ci, site);
    }

    // A call inside procedure F lands back on node "F:to".
    std::string return_site_component(const std::string& current, const std::string& to) const {
        auto it = body_of_.find(current);
        return it == body_of_.end() ? to : proc_node(it->second, to);
    }

    void emit_return(int exit_node, int call_edge, const std::vector<std::string>& site) {
        VEdge r;
        r.from = exit_node;
        r.to = visit(site);
        r.kind = EdgeKind::Return;
        r.label = "return " + g_.edges[static_cast<std::size_t>(call_edge)].procedure;
        r.process = static_cast<int>(*g_.owner);
        r.procedure = g_.edges[static_cast<std::size_t>(call_edge)].procedure;
        r.partner = call_edge;
        int ri = g_.add_edge(std::move(r));
        g_.edges[static_cast<std::size_t>(call_edge)].partner = ri;
    }

    void expand(int n) {
        const auto tuple = g_.tuples[static_cast<std::size_t>(n)];
        if (body_of_.empty())
            for (const auto& f : m_.procedures)
                for (const auto& v : f.nodes) body_of_[proc_node(f.name, v)] = f.name;

        if (g_.owner) {
            std::size_t o = *g_.owner;
            auto it = body_of_.find(tuple[o]);
            if (it != body_of_.end()) {
                const Procedure* f = m_.procedure(it->second);
                for (const auto& t : f->edges) {
                    if (proc_node(f->name, t.from) != tuple[o]) continue;
                    if (t.is_call()) {
                        call(n, tuple, t);
                    } else {
                        auto next = tuple;
                        next[o] = proc_node(f->name, t.to);
                        intra(n, next, t, static_cast<int>(o), f->name);
                    }
                }
                if (tuple[o] == proc_node(f->name, f->exit)) {
                    auto key = std::make_pair(f->name, context_key(tuple));
                    exits_[key] = n;
                    for (const auto& [ci, site] : pending_[key]) emit_return(n, ci, site);
                }
                return;
            }
        }
        for (std::size_t i = 0; i < m_.processes.size(); ++i) {
            for (const auto& t : m_.processes[i].transitions) {
                if (t.from != tuple[i]) continue;
                if (t.is_call()) {
                    if (!g_.owner || *g_.owner != i) throw ModelError("process " + m_.processes[i].name +
                                                                     " calls a procedure but does not own procedures");
                    call(n, tuple, t);
                    continue;
                }
                auto next = tuple;
                next[i] = t.to;
                intra(n, next, t, static_cast<int>(i), "");
            }
        }
    }

    const Model& m_;
    std::size_t max_nodes_;
    Vcfg g_;
    std::deque<int> queue_;
    std::map<std::pair<std::string, std::string>, int> counter_;
    std::map<std::string, std::string> body_of_;
    std::map<std::pair<std::string, std::string>, std::vector<std::pair<int, std::vector<std::string>>>> pending_;
    std::map<std::pair<std::string, std::string>, int> exits_;
};

} // namespace detail

inline constexpr std::size_t default_max_nodes = 1000000;

inline Vcfg build_vcfg(const Model& m, std::size_t max_nodes = default_max_nodes) {
    return detail::VcfgBuilder(m, max_nodes).build();
}

// Product nodes whose component for `process` is `state`.
inline std::vector<int> target_set(const Vcfg& g, const std::string& process, const std::string& state) {
    std::size_t pi = g.process_names.size();
    for (std::size_t i = 0; i < g.process_names.size(); ++i)
        if (g.process_names[i] == process) pi = i;
    if (pi == g.process_names.size()) throw ModelError("unknown process '" + process + "'");
    const auto& states = g.process_states[pi];
    if (std::find(states.begin(), states.end(), state) == states.end())
        throw ModelError("unknown state '" + state + "' of process " + process);
    std::vector<int> out;
    for (std::size_t n = 0; n < g.num_nodes(); ++n)
        if (g.tuples[n].size() > pi && g.tuples[n][pi] == state) out.push_back(static_cast<int>(n));
    return out;
}

inline std::string render_vector(const std::vector<int>& w) {
    std::string s = "⟨";
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(w[i]);
    }
    return s + "⟩";
}

inline std::string to_dot(const Vcfg& g) {
    std::ostringstream os;
    os << "digraph vcfg {\n";
    for (std::size_t n = 0; n < g.num_nodes(); ++n) {
        os << "  \"" << g.ids[n] << "\"";
        if (static_cast<int>(n) == g.start) os << " [shape=doublecircle]";
        os << ";\n";
    }
    for (const auto& e : g.edges) {
        os << "  \"" << g.ids[static_cast<std::size_t>(e.from)] << "\" -> \"" << g.ids[static_cast<std::size_t>(e.to)]
           << "\" [label=\"" << e.label << " / " << render_vector(e.w) << "\"";
        if (e.kind != EdgeKind::Intra) os << ", style=dashed";
        os << "];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace dfas
