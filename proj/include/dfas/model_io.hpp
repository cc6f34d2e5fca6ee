#pragma once

// JSON model files (schema_version 1). See docs/model-schema.md.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dfas/model.hpp"

namespace dfas {

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

class ModelReader {
  public:
    Model read(const ojson& root) {
        if (!root.is_object()) fail("", "top level must be an object");
        check_keys(root, "", {"schema_version", "channels", "messages", "variables", "processes", "procedures",
                              "assertions"});
        if (!root.contains("schema_version")) fail("", "missing schema_version");
        if (!root["schema_version"].is_number_integer() || root["schema_version"].get<int>() != 1)
            fail("schema_version", "unsupported schema_version (expected 1)");

        m_.channels = names(root, "channels");
        m_.messages = names(root, "messages");
        for (const auto& c : m_.channels) channels_.insert(c);
        for (const auto& c : m_.messages) messages_.insert(c);

        const auto& vars = array(root, "variables");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            auto path = "variables[" + std::to_string(i) + "]";
            const auto& v = vars[i];
            if (!v.is_object()) fail(path, "expected an object");
            check_keys(v, path, {"name", "init"});
            Variable var{str(v, path, "name"), Int(0)};
            if (!is_ident(var.name)) fail(path + ".name", "invalid identifier '" + var.name + "'");
            if (var.name == "true" || var.name == "false" || var.name == "skip" || var.name == "assume")
                fail(path + ".name", "reserved word '" + var.name + "'");
            if (!seen.insert(var.name).second) fail(path + ".name", "duplicate variable '" + var.name + "'");
            if (v.contains("init")) var.init = integer(v["init"], path + ".init");
            m_.variables.push_back(std::move(var));
        }
        var_names_ = m_.var_names();

        // Procedure names must be known before call transitions are read.
        const auto& procs = array(root, "procedures");
        std::set<std::string> proc_names;
        for (std::size_t i = 0; i < procs.size(); ++i) {
            auto path = "procedures[" + std::to_string(i) + "]";
            if (!procs[i].is_object()) fail(path, "expected an object");
            auto name = str(procs[i], path, "name");
            if (!proc_names.insert(name).second) fail(path + ".name", "duplicate procedure '" + name + "'");
            procs_.insert(name);
        }

        const auto& ps = array(root, "processes");
        std::set<std::string> pnames;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            auto path = "processes[" + std::to_string(i) + "]";
            const auto& p = ps[i];
            if (!p.is_object()) fail(path, "expected an object");
            check_keys(p, path, {"name", "initial", "states", "transitions"});
            Process proc;
            proc.name = str(p, path, "name");
            if (!pnames.insert(proc.name).second) fail(path + ".name", "duplicate process '" + proc.name + "'");
            proc.states = names(p, "states", path);
            if (proc.states.empty()) fail(path + ".states", "process has no states");
            std::set<std::string> states(proc.states.begin(), proc.states.end());
            proc.initial = p.contains("initial") ? str(p, path, "initial") : proc.states.front();
            if (!states.count(proc.initial)) fail(path + ".initial", "unknown state '" + proc.initial + "'");
            const auto& ts = array(p, "transitions", path);
            for (std::size_t j = 0; j < ts.size(); ++j)
                proc.transitions.push_back(transition(ts[j], path + ".transitions[" + std::to_string(j) + "]", states));
            m_.processes.push_back(std::move(proc));
        }

        for (std::size_t i = 0; i < procs.size(); ++i) {
            auto path = "procedures[" + std::to_string(i) + "]";
            const auto& f = procs[i];
            check_keys(f, path, {"name", "entry", "exit", "nodes", "edges", "process"});
            Procedure proc;
            proc.name = str(f, path, "name");
            proc.nodes = names(f, "nodes", path);
            std::set<std::string> nodes(proc.nodes.begin(), proc.nodes.end());
            proc.entry = str(f, path, "entry");
            proc.exit = str(f, path, "exit");
            if (!nodes.count(proc.entry)) fail(path + ".entry", "unknown node '" + proc.entry + "'");
            if (!nodes.count(proc.exit)) fail(path + ".exit", "unknown node '" + proc.exit + "'");
            if (f.contains("process")) {
                proc.process = str(f, path, "process");
                if (!pnames.count(*proc.process)) fail(path + ".process", "unknown process '" + *proc.process + "'");
            }
            const auto& es = array(f, "edges", path);
            for (std::size_t j = 0; j < es.size(); ++j)
                proc.edges.push_back(transition(es[j], path + ".edges[" + std::to_string(j) + "]", nodes));
            m_.procedures.push_back(std::move(proc));
        }

        const auto& as = array(root, "assertions");
        for (std::size_t i = 0; i < as.size(); ++i) {
            auto path = "assertions[" + std::to_string(i) + "]";
            const auto& a = as[i];
            if (!a.is_object()) fail(path, "expected an object");
            check_keys(a, path, {"process", "state", "expr"});
            Assertion asr;
            asr.process = str(a, path, "process");
            asr.state = str(a, path, "state");
            const Process* owner = m_.process(asr.process);
            if (!owner) fail(path + ".process", "unknown process '" + asr.process + "'");
            if (!has_state(*owner, asr.state)) fail(path + ".state", "unknown state '" + asr.state + "'");
            auto text = str(a, path, "expr");
            try {
                asr.expr = parse_bool_expr(text, resolver_for(var_names_));
            } catch (const SyntaxError& e) {
                fail(path + ".expr", e.what());
            }
            asr.text = render(*asr.expr, var_names_);
            m_.assertions.push_back(std::move(asr));
        }
        return std::move(m_);
    }

  private:
    [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
        throw ModelError(path.empty() ? msg : path + ": " + msg);
    }

    static bool is_ident(const std::string& s) { return detail::is_ident(s); }

    // A state may also name a procedure node "F:n" of the owning process.
    bool has_state(const Process& p, const std::string& s) const {
        if (std::find(p.states.begin(), p.states.end(), s) != p.states.end()) return true;
        for (const auto& f : m_.procedures)
            for (const auto& n : f.nodes)
                if (proc_node(f.name, n) == s) return true;
        return false;
    }

    static void check_keys(const ojson& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
        for (const auto& [k, _] : obj.items()) {
            bool ok = false;
            for (auto a : allowed) ok = ok || k == a;
            if (!ok) fail(path, "unknown key '" + k + "'");
        }
    }

    static const ojson& array(const ojson& obj, const std::string& key, const std::string& path = "") {
        static const ojson empty = ojson::array();
        if (!obj.contains(key)) return empty;
        const auto& v = obj[key];
        if (!v.is_array()) fail(path.empty() ? key : path + "." + key, "expected an array");
        return v;
    }

    static std::string str(const ojson& obj, const std::string& path, const std::string& key) {
        auto full = path.empty() ? key : path + "." + key;
        if (!obj.contains(key)) fail(full, "missing");
        if (!obj[key].is_string()) fail(full, "expected a string");
        return obj[key].get<std::string>();
    }

    static Int integer(const ojson& v, const std::string& path) {
        if (v.is_number_integer()) return Int(v.get<std::int64_t>());
        if (v.is_string()) {
            auto s = v.get<std::string>();
            std::size_t start = (!s.empty() && s[0] == '-') ? 1 : 0;
            if (s.size() > start && s.find_first_not_of("0123456789", start) == std::string::npos) return Int(s);
        }
        fail(path, "expected an integer");
    }

    static std::vector<std::string> names(const ojson& obj, const std::string& key, const std::string& path = "") {
        std::vector<std::string> out;
        std::set<std::string> seen;
        const auto& arr = array(obj, key, path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto p = (path.empty() ? key : path + "." + key) + "[" + std::to_string(i) + "]";
            if (!arr[i].is_string()) fail(p, "expected a string");
            auto s = arr[i].get<std::string>();
            if (!is_ident(s)) fail(p, "invalid identifier '" + s + "'");
            if (!seen.insert(s).second) fail(p, "duplicate declaration '" + s + "'");
            out.push_back(std::move(s));
        }
        return out;
    }

    Transition transition(const ojson& t, const std::string& path, const std::set<std::string>& states) {
        if (!t.is_object()) fail(path, "expected an object");
        check_keys(t, path, {"from", "to", "action", "call"});
        Transition tr;
        tr.from = str(t, path, "from");
        tr.to = str(t, path, "to");
        if (!states.count(tr.from)) fail(path + ".from", "unknown state '" + tr.from + "'");
        if (!states.count(tr.to)) fail(path + ".to", "unknown state '" + tr.to + "'");
        if (t.contains("call")) {
            if (t.contains("action")) fail(path, "a transition has either an action or a call");
            tr.call = str(t, path, "call");
            if (!procs_.count(*tr.call)) fail(path + ".call", "unknown procedure '" + *tr.call + "'");
            tr.text = "call " + *tr.call;
            return tr;
        }
        auto text = t.contains("action") ? str(t, path, "action") : std::string("skip");
        try {
            tr.action = parse_action(text, resolver_for(var_names_));
        } catch (const SyntaxError& e) {
            fail(path + ".action", e.what());
        }
        int queue_ops = 0;
        for (const auto& st : tr.action.stmts) {
            const std::string* ch = nullptr;
            const std::string* msg = nullptr;
            if (auto s = std::get_if<Send>(&st)) ch = &s->channel, msg = &s->message;
            if (auto r = std::get_if<Receive>(&st)) ch = &r->channel, msg = &r->message;
            if (!ch) continue;
            ++queue_ops;
            if (!channels_.count(*ch)) fail(path + ".action", "unknown channel '" + *ch + "'");
            if (!messages_.count(*msg)) fail(path + ".action", "unknown message '" + *msg + "'");
        }
        if (queue_ops > 1) fail(path + ".action", "at most one send or receive per transition");
        tr.text = render(tr.action, var_names_);
        return tr;
    }

    Model m_;
    std::vector<std::string> var_names_;
    std::set<std::string> channels_, messages_, procs_;
};

inline ojson write_transition(const Transition& t) {
    ojson o;
    o["from"] = t.from;
    o["to"] = t.to;
    if (t.call) o["call"] = *t.call;
    else o["action"] = t.text;
    return o;
}

} // namespace detail

inline Model parse_model(std::string_view text) {
    detail::ojson root;
    try {
        root = detail::ojson::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ModelError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
    return detail::ModelReader{}.read(root);
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

inline std::string render_model(const Model& m) {
    using detail::ojson;
    ojson root;
    root["schema_version"] = 1;
    root["channels"] = m.channels;
    root["messages"] = m.messages;
    root["variables"] = ojson::array();
    for (const auto& v : m.variables) {
        ojson o;
        o["name"] = v.name;
        if (fits_int64(v.init)) o["init"] = v.init.convert_to<std::int64_t>();
        else o["init"] = v.init.str();
        root["variables"].push_back(o);
    }
    root["processes"] = ojson::array();
    for (const auto& p : m.processes) {
        ojson o;
        o["name"] = p.name;
        o["initial"] = p.initial;
        o["states"] = p.states;
        o["transitions"] = ojson::array();
        for (const auto& t : p.transitions) o["transitions"].push_back(detail::write_transition(t));
        root["processes"].push_back(o);
    }
    root["procedures"] = ojson::array();
    for (const auto& f : m.procedures) {
        ojson o;
        o["name"] = f.name;
        if (f.process) o["process"] = *f.process;
        o["entry"] = f.entry;
        o["exit"] = f.exit;
        o["nodes"] = f.nodes;
        o["edges"] = ojson::array();
        for (const auto& t : f.edges) o["edges"].push_back(detail::write_transition(t));
        root["procedures"].push_back(o);
    }
    root["assertions"] = ojson::array();
    for (const auto& a : m.assertions) {
        ojson o;
        o["process"] = a.process;
        o["state"] = a.state;
        o["expr"] = a.text;
        root["assertions"].push_back(o);
    }
    return root.dump(2) + "\n";
}

} // namespace dfas
