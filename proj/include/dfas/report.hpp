#pragma once

// Engine orchestration and reports: per-use constant findings, assertion
// verdicts, engine comparison. Reports are ordered JSON so that equal inputs
// serialize to equal bytes.

#include <algorithm>
#include <chrono>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfas/attach.hpp"
#include "dfas/backward.hpp"
#include "dfas/forward.hpp"
#include "dfas/model.hpp"
#include "dfas/vcfg.hpp"

namespace dfas {

using ojson = nlohmann::ordered_json;

class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class Engine { Backward, Forward, Jop };

inline const char* to_string(Engine e) {
    switch (e) {
    case Engine::Backward: return "backward";
    case Engine::Forward: return "forward";
    default: return "jop";
    }
}

inline Engine parse_engine(const std::string& s) {
    if (s == "backward") return Engine::Backward;
    if (s == "forward") return Engine::Forward;
    if (s == "jop") return Engine::Jop;
    throw UsageError("unknown engine '" + s + "'");
}

inline std::string default_domain(Engine e) { return e == Engine::Backward ? "lcp" : "cp"; }

struct RunConfig {
    Engine engine = Engine::Backward;
    std::string domain = "lcp";
    int theta = 2;
    std::size_t threads = 1;
    std::size_t max_iters = 10000000;
    std::size_t max_paths = 2000000;
    bool trace = false;
};

inline std::string run_label(const RunConfig& c) {
    std::string s = std::string(to_string(c.engine)) + "/" + c.domain;
    if (c.engine == Engine::Forward) s += "/theta=" + std::to_string(c.theta);
    return s;
}

namespace detail {

class RunnerBase {
  public:
    virtual ~RunnerBase() = default;
    virtual CpEnv eval(const std::vector<int>& nodes) = 0;
    ojson stats = ojson::object();
    std::vector<TraceEvent> trace;
};

template <ValueDomain D>
class Runner : public RunnerBase {
  public:
    Runner(const Vcfg& g, const RunConfig& cfg) : g_(g), cfg_(cfg), ag_(attach_domain<D>(g)) {
        stats["targets"] = 0;
        if (cfg.engine == Engine::Backward) {
            stats["retained_paths"] = 0;
            stats["rejected_paths"] = 0;
            stats["worklist_pops"] = 0;
            stats["summary_paths"] = 0;
        }
    }

    CpEnv eval(const std::vector<int>& nodes) override {
        stats["targets"] = stats["targets"].get<std::size_t>() + 1;
        CpEnv d0 = g_.initial_env();
        switch (cfg_.engine) {
        case Engine::Backward: {
            if constexpr (FunctionDomain<D>) {
                BackwardOptions opt;
                opt.max_paths = cfg_.max_paths;
                opt.trace = cfg_.trace;
                opt.threads = cfg_.threads;
                auto r = backward_jofp(ag_, nodes, d0, opt);
                stats["retained_paths"] = stats["retained_paths"].get<std::size_t>() + r.stats.retained;
                stats["rejected_paths"] = stats["rejected_paths"].get<std::size_t>() + r.stats.rejected;
                stats["worklist_pops"] = stats["worklist_pops"].get<std::size_t>() + r.stats.extended;
                stats["summary_paths"] = stats["summary_paths"].get<std::size_t>() + r.stats.summaries;
                for (auto& ev : r.trace) trace.push_back(std::move(ev));
                return r.value;
            } else {
                throw UsageError("backward engine needs a function domain (lcp or ccp)");
            }
        }
        case Engine::Forward: {
            if (!fwd_) {
                ForwardOptions opt;
                opt.theta = cfg_.theta;
                opt.max_iters = cfg_.max_iters;
                fwd_ = forward_analyze(ag_, d0, opt);
                stats["iterations"] = fwd_->stats.iterations;
                stats["config_slots"] = fwd_->stats.slots;
            }
            CpEnv out = CpEnv::bottom(g_.nvars());
            for (int n : nodes) out = cp_join(out, fwd_->at(n, g_.nvars()));
            return out;
        }
        default: {
            if (!jop_) {
                jop_ = jop_analyze(ag_, d0, cfg_.max_iters);
                stats["iterations"] = jop_->iterations;
            }
            CpEnv out = CpEnv::bottom(g_.nvars());
            for (int n : nodes) out = cp_join(out, jop_->values[static_cast<std::size_t>(n)]);
            return out;
        }
        }
    }

  private:
    const Vcfg& g_;
    RunConfig cfg_;
    AttachedGraph<D> ag_;
    std::optional<ForwardResult> fwd_;
    std::optional<JopResult> jop_;
};

} // namespace detail

// Answers "value at process.state" queries for one engine/domain choice.
class Analyzer {
  public:
    Analyzer(const Vcfg& g, RunConfig cfg) : g_(g), cfg_(std::move(cfg)) {
        if (cfg_.domain == "cp") {
            if (cfg_.engine == Engine::Backward)
                throw UsageError("backward engine needs a function domain (lcp or ccp), not cp");
            runner_ = std::make_unique<detail::Runner<CpDomain>>(g_, cfg_);
        } else if (cfg_.domain == "lcp") {
            runner_ = std::make_unique<detail::Runner<LcpDomain>>(g_, cfg_);
        } else if (cfg_.domain == "ccp") {
            runner_ = std::make_unique<detail::Runner<CcpDomain>>(g_, cfg_);
        } else {
            throw UsageError("unknown domain '" + cfg_.domain + "'");
        }
        if (cfg_.engine != Engine::Backward && g_.has_procedures())
            throw UsageError(std::string(to_string(cfg_.engine)) + " engine unsupported: procedures present");
    }

    CpEnv at(const std::string& process, const std::string& state) {
        auto key = process + "." + state;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto v = runner_->eval(target_set(g_, process, state));
        cache_.emplace(key, v);
        return v;
    }

    [[nodiscard]] const ojson& stats() const { return runner_->stats; }
    [[nodiscard]] const std::vector<TraceEvent>& trace() const { return runner_->trace; }
    [[nodiscard]] const RunConfig& config() const { return cfg_; }

  private:
    const Vcfg& g_;
    RunConfig cfg_;
    std::unique_ptr<detail::RunnerBase> runner_;
    std::map<std::string, CpEnv> cache_;
};

// ---------------------------------------------------------------------------
// Findings

struct Use {
    std::string process, state;
    std::vector<int> vars; // declaration order
};

inline void reads_of(const Action& a, std::set<int>& out) {
    std::vector<int> vs;
    for (const auto& st : a.stmts) {
        if (auto as = std::get_if<Assign>(&st)) collect_vars(*as->rhs, vs);
        if (auto am = std::get_if<Assume>(&st)) collect_vars(*am->cond, vs);
    }
    out.insert(vs.begin(), vs.end());
}

// Variables read by a state's outgoing actions or by its assertions.
inline std::vector<Use> collect_uses(const Model& m) {
    std::map<std::pair<std::string, std::string>, std::set<int>> reads;
    std::optional<std::size_t> owner = m.procedure_owner();
    for (const auto& p : m.processes)
        for (const auto& t : p.transitions) reads_of(t.action, reads[{p.name, t.from}]);
    if (owner)
        for (const auto& f : m.procedures)
            for (const auto& t : f.edges)
                reads_of(t.action, reads[{m.processes[*owner].name, proc_node(f.name, t.from)}]);
    for (const auto& a : m.assertions) {
        std::vector<int> vs;
        collect_vars(*a.expr, vs);
        reads[{a.process, a.state}].insert(vs.begin(), vs.end());
    }
    std::vector<Use> out;
    // Report in declaration order of processes and states.
    auto emit = [&](const std::string& proc, const std::string& state) {
        auto it = reads.find({proc, state});
        if (it == reads.end() || it->second.empty()) return;
        out.push_back({proc, state, std::vector<int>(it->second.begin(), it->second.end())});
    };
    for (std::size_t i = 0; i < m.processes.size(); ++i) {
        for (const auto& s : m.processes[i].states) emit(m.processes[i].name, s);
        if (owner && *owner == i)
            for (const auto& f : m.procedures)
                for (const auto& n : f.nodes) emit(m.processes[i].name, proc_node(f.name, n));
    }
    return out;
}

struct Finding {
    std::string process, state, variable, value; // value: integer, "⊤", or "⊥"
    [[nodiscard]] bool constant() const { return value != "⊤"; }
    friend auto operator<=>(const Finding&, const Finding&) = default;
};

inline std::string value_text(const CpEnv& env, std::size_t v) {
    if (!env.reachable()) return "⊥";
    return render_cp_val(env[v]);
}

inline ojson value_json(const CpEnv& env, std::size_t v) {
    if (!env.reachable()) return "⊥";
    const auto& c = env[v];
    if (!c) return "⊤";
    if (fits_int64(*c)) return c->convert_to<std::int64_t>();
    return c->str();
}

inline std::vector<Finding> findings(const Model& m, Analyzer& an) {
    std::vector<Finding> out;
    auto names = m.var_names();
    for (const auto& u : collect_uses(m)) {
        auto env = an.at(u.process, u.state);
        for (int v : u.vars)
            out.push_back({u.process, u.state, names[static_cast<std::size_t>(v)],
                           value_text(env, static_cast<std::size_t>(v))});
    }
    return out;
}

inline std::set<Finding> constant_set(const std::vector<Finding>& fs) {
    std::set<Finding> out;
    for (const auto& f : fs)
        if (f.constant()) out.insert(f);
    return out;
}

enum class Verdict { Verified, Unknown };

// Verified when every referenced variable is constant and the assertion holds,
// or when the state is unreachable.
inline Verdict verdict(const Assertion& a, const CpEnv& env) {
    if (!env.reachable()) return Verdict::Verified;
    std::vector<int> vs;
    collect_vars(*a.expr, vs);
    for (int v : vs)
        if (!env[static_cast<std::size_t>(v)]) return Verdict::Unknown;
    auto r = cp_eval_bool(*a.expr, env);
    return r && *r ? Verdict::Verified : Verdict::Unknown;
}

// ---------------------------------------------------------------------------
// Reports

inline ojson engine_json(const RunConfig& c) {
    ojson o;
    o["engine"] = to_string(c.engine);
    o["domain"] = c.domain;
    if (c.engine == Engine::Forward) o["theta"] = c.theta;
    return o;
}

inline ojson trace_json(const std::vector<TraceEvent>& trace) {
    ojson arr = ojson::array();
    for (const auto& ev : trace) {
        ojson o;
        o["event"] = to_string(ev.kind);
        if (!ev.procedure.empty()) o["procedure"] = ev.procedure;
        o["path"] = ev.path;
        o[ev.procedure.empty() ? "demand" : "supply"] = ev.measure;
        o["ptf"] = ev.ptf;
        if (!ev.cover.empty()) o["covered_by"] = ev.cover;
        arr.push_back(o);
    }
    return arr;
}

inline ojson analyze_report(const Model& m, const Vcfg& g, Analyzer& an, const std::optional<std::string>& target) {
    ojson r;
    r["command"] = "analyze";
    r["config"] = engine_json(an.config());
    auto names = m.var_names();
    if (target) {
        auto dot = target->find('.');
        if (dot == std::string::npos) throw UsageError("target must be process.state");
        auto proc = target->substr(0, dot), state = target->substr(dot + 1);
        auto env = an.at(proc, state);
        ojson t;
        t["process"] = proc;
        t["state"] = state;
        ojson nodes = ojson::array();
        for (int n : target_set(g, proc, state)) nodes.push_back(g.ids[static_cast<std::size_t>(n)]);
        t["nodes"] = nodes;
        t["reachable"] = env.reachable();
        ojson vals = ojson::object();
        for (std::size_t v = 0; v < names.size(); ++v) vals[names[v]] = value_json(env, v);
        t["values"] = vals;
        r["target"] = t;
    } else {
        ojson arr = ojson::array();
        for (const auto& f : findings(m, an)) {
            ojson o;
            o["process"] = f.process;
            o["state"] = f.state;
            o["variable"] = f.variable;
            auto env = an.at(f.process, f.state);
            std::size_t v = std::find(names.begin(), names.end(), f.variable) - names.begin();
            o["value"] = value_json(env, v);
            arr.push_back(o);
        }
        r["findings"] = arr;
    }
    r["stats"] = an.stats();
    return r;
}

inline ojson check_report(const Model& m, Analyzer& an) {
    ojson r;
    r["command"] = "check";
    r["config"] = engine_json(an.config());
    ojson arr = ojson::array();
    std::size_t verified = 0;
    for (const auto& a : m.assertions) {
        auto env = an.at(a.process, a.state);
        bool ok = verdict(a, env) == Verdict::Verified;
        verified += ok;
        ojson o;
        o["process"] = a.process;
        o["state"] = a.state;
        o["expr"] = a.text;
        o["verdict"] = ok ? "verified" : "unknown";
        arr.push_back(o);
    }
    r["assertions"] = arr;
    r["verified"] = verified;
    r["total"] = m.assertions.size();
    r["stats"] = an.stats();
    return r;
}

// Every engine/domain pair the comparison table covers, in table order.
inline std::vector<RunConfig> compare_configs(const std::vector<int>& thetas, const RunConfig& base) {
    std::vector<RunConfig> out;
    auto add = [&](Engine e, const std::string& dom, int theta) {
        RunConfig c = base;
        c.engine = e;
        c.domain = dom;
        c.theta = theta;
        c.trace = false;
        out.push_back(c);
    };
    add(Engine::Backward, "lcp", 0);
    add(Engine::Backward, "ccp", 0);
    for (int t : thetas) add(Engine::Forward, "cp", t);
    add(Engine::Jop, "cp", 0);
    return out;
}

inline ojson compare_report(const Model& m, const Vcfg& g, const std::vector<int>& thetas, const RunConfig& base) {
    auto diags = validate(m);
    ojson rows = ojson::array();
    for (const auto& c : compare_configs(thetas, base)) {
        ojson row = engine_json(c);
        std::string engine = to_string(c.engine);
        const Diagnostic* block = nullptr;
        for (const auto& d : diags)
            if (std::find(d.engines.begin(), d.engines.end(), engine) != d.engines.end()) {
                block = &d;
                break;
            }
        if (block) {
            row["status"] = block->rule == "forward-no-procedures" ? "unsupported (procedures)"
                                                                   : "unsupported (" + block->rule + ")";
            rows.push_back(row);
            continue;
        }
        Analyzer an(g, c);
        auto fs = findings(m, an);
        std::size_t verified = 0;
        for (const auto& a : m.assertions) verified += verdict(a, an.at(a.process, a.state)) == Verdict::Verified;
        row["status"] = "ok";
        row["constants"] = constant_set(fs).size();
        row["uses"] = fs.size();
        row["assertions_verified"] = verified;
        rows.push_back(row);
    }
    ojson r;
    r["command"] = "compare";
    r["assertions"] = m.assertions.size();
    r["rows"] = rows;
    return r;
}

} // namespace dfas
