#pragma once

// Asynchronous system description: processes exchanging messages over
// unbounded unordered channels, optional recursive procedures for a single
// process, and assertions over shared integer variables.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfas/expr.hpp"
#include "dfas/integer.hpp"

namespace dfas {

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Variable {
    std::string name;
    Int init;
    friend bool operator==(const Variable&, const Variable&) = default;
};

// Either an action-labelled transition or a call of a procedure.
struct Transition {
    std::string from, to;
    Action action;
    std::optional<std::string> call;
    std::string text; // canonical rendering of the action

    [[nodiscard]] bool is_call() const { return call.has_value(); }

    friend bool operator==(const Transition& a, const Transition& b) {
        return a.from == b.from && a.to == b.to && a.call == b.call && a.text == b.text;
    }
};

struct Process {
    std::string name;
    std::string initial;
    std::vector<std::string> states;
    std::vector<Transition> transitions;
    friend bool operator==(const Process&, const Process&) = default;
};

struct Procedure {
    std::string name;
    std::string entry, exit;
    std::vector<std::string> nodes;
    std::vector<Transition> edges;
    std::optional<std::string> process; // owner, inferred when absent
    friend bool operator==(const Procedure&, const Procedure&) = default;
};

struct Assertion {
    std::string process, state;
    ExprPtr expr;
    std::string text;
    friend bool operator==(const Assertion& a, const Assertion& b) {
        return a.process == b.process && a.state == b.state && a.text == b.text;
    }
};

struct Model {
    std::vector<std::string> channels;
    std::vector<std::string> messages;
    std::vector<Variable> variables;
    std::vector<Process> processes;
    std::vector<Procedure> procedures;
    std::vector<Assertion> assertions;

    [[nodiscard]] std::vector<std::string> var_names() const {
        std::vector<std::string> out;
        for (const auto& v : variables) out.push_back(v.name);
        return out;
    }

    [[nodiscard]] const Process* process(const std::string& name) const {
        for (const auto& p : processes)
            if (p.name == name) return &p;
        return nullptr;
    }

    [[nodiscard]] const Procedure* procedure(const std::string& name) const {
        for (const auto& p : procedures)
            if (p.name == name) return &p;
        return nullptr;
    }

    // Index of the process that runs procedures, if any. With several
    // candidates the first is returned; validate() reports the conflict.
    [[nodiscard]] std::optional<std::size_t> procedure_owner() const {
        for (const auto& f : procedures) {
            if (!f.process) continue;
            for (std::size_t i = 0; i < processes.size(); ++i)
                if (processes[i].name == *f.process) return i;
        }
        for (std::size_t i = 0; i < processes.size(); ++i)
            for (const auto& t : processes[i].transitions)
                if (t.is_call()) return i;
        if (!procedures.empty() && !processes.empty()) return 0;
        return std::nullopt;
    }

    friend bool operator==(const Model&, const Model&) = default;
};

inline std::string proc_node(const std::string& proc, const std::string& node) { return proc + ":" + node; }

// ---------------------------------------------------------------------------
// Validation

struct Diagnostic {
    std::string rule;
    std::string message;
    std::vector<std::string> engines; // engines this diagnostic disables
};

inline const std::vector<std::string>& all_engines() {
    static const std::vector<std::string> e{"backward", "forward", "jop"};
    return e;
}

inline bool blocks(const std::vector<Diagnostic>& diags, const std::string& engine) {
    for (const auto& d : diags)
        if (std::find(d.engines.begin(), d.engines.end(), engine) != d.engines.end()) return true;
    return false;
}

namespace detail {

inline bool body_has_cycle(const Procedure& f) {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& e : f.edges) succ[e.from].push_back(e.to);
    std::map<std::string, int> color; // 0 white, 1 grey, 2 black
    std::function<bool(const std::string&)> dfs = [&](const std::string& n) {
        color[n] = 1;
        for (const auto& m : succ[n]) {
            if (color[m] == 1) return true;
            if (color[m] == 0 && dfs(m)) return true;
        }
        color[n] = 2;
        return false;
    };
    for (const auto& n : f.nodes)
        if (color[n] == 0 && dfs(n)) return true;
    return false;
}

} // namespace detail

inline std::vector<Diagnostic> validate(const Model& m) {
    std::vector<Diagnostic> out;
    if (m.processes.empty())
        out.push_back({"no-processes", "model declares no processes", all_engines()});

    std::set<std::string> owners;
    for (const auto& f : m.procedures)
        if (f.process) owners.insert(*f.process);
    for (const auto& p : m.processes)
        for (const auto& t : p.transitions)
            if (t.is_call()) owners.insert(p.name);
    if (owners.size() > 1) {
        std::string names;
        for (const auto& o : owners) names += (names.empty() ? "" : ", ") + o;
        out.push_back({"single-procedure-owner", "procedures used by more than one process: " + names, all_engines()});
    }

    if (!m.procedures.empty())
        out.push_back({"forward-no-procedures", "forward engine unsupported: procedures present", {"forward", "jop"}});

    for (const auto& f : m.procedures) {
        for (const auto& e : f.edges) {
            if (e.action.receive()) {
                out.push_back({"no-receive-in-procedure",
                               "procedure " + f.name + " receives on edge " + e.from + " -> " + e.to +
                                   "; only the main body may receive",
                               {"backward"}});
                break;
            }
        }
        if (detail::body_has_cycle(f))
            out.push_back({"loop-free-procedure", "procedure " + f.name + " contains a loop", {"backward"}});
    }

    std::set<std::pair<std::string, std::string>> sent;
    auto each_transition = [&](auto&& fn) {
        for (const auto& p : m.processes)
            for (const auto& t : p.transitions) fn(t);
        for (const auto& f : m.procedures)
            for (const auto& t : f.edges) fn(t);
    };
    each_transition([&](const Transition& t) {
        if (auto s = t.action.send()) sent.insert({s->channel, s->message});
    });
    std::set<std::pair<std::string, std::string>> reported;
    each_transition([&](const Transition& t) {
        auto r = t.action.receive();
        if (!r || sent.count({r->channel, r->message}) || !reported.insert({r->channel, r->message}).second) return;
        out.push_back({"receive-without-send",
                       "message " + r->message + " on channel " + r->channel + " is received but never sent",
                       all_engines()});
    });
    return out;
}

} // namespace dfas
