// dfas: constant propagation over asynchronous message-passing models.
//
//   dfas analyze MODEL [--engine E] [--domain D] [--theta N] [--target P.s] [--json]
//   dfas check   MODEL [--engine E] [--domain D] [--theta N] [--json]
//   dfas compare MODEL [--theta N]... [--json]
//
// Exit codes: 0 success, 1 model parse/validation failure, 2 analysis abort,
// 3 usage error. Set DFAS_LOG=debug|info|warn|... for diagnostics on stderr.

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dfas/dfas.hpp"

namespace {

enum Exit { Ok = 0, ModelFailure = 1, Abort = 2, Usage = 3 };

struct Options {
    std::string model;
    std::string engine = "backward";
    std::string domain;
    int theta = 2;
    std::vector<int> thetas;
    std::string target;
    bool json = false;
    bool trace = false;
    bool timing = false;
    std::size_t threads = 1;
    std::size_t max_nodes = dfas::default_max_nodes;
    std::size_t max_iters = 10000000;
    std::size_t max_paths = 2000000;
};

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("dfas");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    const char* level = std::getenv("DFAS_LOG");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

dfas::RunConfig run_config(const Options& o) {
    dfas::RunConfig c;
    c.engine = dfas::parse_engine(o.engine);
    c.domain = o.domain.empty() ? dfas::default_domain(c.engine) : o.domain;
    if (o.theta < 0) throw dfas::UsageError("--theta must be non-negative");
    c.theta = o.theta;
    c.threads = std::max<std::size_t>(1, o.threads);
    c.max_iters = o.max_iters;
    c.max_paths = o.max_paths;
    c.trace = o.trace;
    return c;
}

// Prints diagnostics that disable `engine` (or any engine when empty) and
// reports whether one was found.
bool report_blocking(const std::vector<dfas::Diagnostic>& diags, const std::string& engine) {
    bool blocked = false;
    for (const auto& d : diags) {
        bool hit = engine.empty() ? d.engines.size() == dfas::all_engines().size()
                                  : std::find(d.engines.begin(), d.engines.end(), engine) != d.engines.end();
        if (!hit) continue;
        std::cerr << "error: " << d.message << " [" << d.rule << "]\n";
        blocked = true;
    }
    return blocked;
}

void print_trace(const std::vector<dfas::TraceEvent>& trace) {
    for (const auto& ev : trace) {
        std::cerr << dfas::to_string(ev.kind);
        if (!ev.procedure.empty()) std::cerr << " " << ev.procedure;
        std::cerr << "  " << ev.path << "  " << (ev.procedure.empty() ? "demand " : "supply ")
                  << dfas::render_vec(ev.measure) << "  " << ev.ptf;
        if (!ev.cover.empty()) {
            std::cerr << "  covered by {";
            for (std::size_t i = 0; i < ev.cover.size(); ++i) std::cerr << (i ? "; " : "") << ev.cover[i];
            std::cerr << "}";
        }
        std::cerr << "\n";
    }
}

void print_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    auto cols = [](const std::string& s) {
        // display width of UTF-8 text
        std::size_t n = 0;
        for (unsigned char c : s) n += (c & 0xC0) != 0x80;
        return n;
    };
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (width.size() <= i) width.push_back(0);
            width[i] = std::max(width[i], cols(r[i]));
        }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            line += r[i];
            if (i + 1 < r.size()) line += std::string(width[i] - cols(r[i]) + 2, ' ');
        }
        std::cout << line << "\n";
    }
}

std::string cell(const dfas::ojson& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

void print_human(const dfas::ojson& r) {
    const auto& cmd = r["command"];
    if (cmd == "compare") {
        std::vector<std::vector<std::string>> rows{{"engine", "domain", "theta", "constants", "uses", "verified"}};
        for (const auto& row : r["rows"]) {
            std::string theta = row.contains("theta") ? cell(row["theta"]) : "-";
            if (row["status"] != "ok") {
                rows.push_back({cell(row["engine"]), cell(row["domain"]), theta, cell(row["status"]), "", ""});
                continue;
            }
            rows.push_back({cell(row["engine"]), cell(row["domain"]), theta, cell(row["constants"]), cell(row["uses"]),
                            cell(row["assertions_verified"]) + "/" + cell(r["assertions"])});
        }
        print_table(rows);
        return;
    }
    const auto& c = r["config"];
    std::cout << "engine " << cell(c["engine"]) << ", domain " << cell(c["domain"]);
    if (c.contains("theta")) std::cout << ", theta " << cell(c["theta"]);
    std::cout << "\n";
    if (cmd == "check") {
        std::vector<std::vector<std::string>> rows{{"process", "state", "assertion", "verdict"}};
        for (const auto& a : r["assertions"])
            rows.push_back({cell(a["process"]), cell(a["state"]), cell(a["expr"]), cell(a["verdict"])});
        print_table(rows);
        std::cout << cell(r["verified"]) << "/" << cell(r["total"]) << " assertions verified\n";
    } else if (r.contains("target")) {
        const auto& t = r["target"];
        std::cout << cell(t["process"]) << "." << cell(t["state"]) << " (" << t["nodes"].size() << " node"
                  << (t["nodes"].size() == 1 ? "" : "s") << ")";
        if (!t["reachable"].get<bool>()) std::cout << ": unreachable";
        std::cout << "\n";
        std::vector<std::vector<std::string>> rows{{"variable", "value"}};
        for (const auto& [k, v] : t["values"].items()) rows.push_back({k, cell(v)});
        print_table(rows);
    } else {
        std::vector<std::vector<std::string>> rows{{"process", "state", "variable", "value"}};
        std::size_t constants = 0;
        for (const auto& f : r["findings"]) {
            rows.push_back({cell(f["process"]), cell(f["state"]), cell(f["variable"]), cell(f["value"])});
            constants += f["value"] != "⊤";
        }
        print_table(rows);
        std::cout << constants << "/" << r["findings"].size() << " uses constant\n";
    }
}

int run(const std::string& command, const Options& o) {
    dfas::Model m;
    try {
        m = dfas::load_model(o.model);
    } catch (const dfas::ModelError& e) {
        std::cerr << o.model << ": " << e.what() << "\n";
        return ModelFailure;
    }
    auto diags = dfas::validate(m);
    for (const auto& d : diags) spdlog::info("validate: {} [{}]", d.message, d.rule);

    dfas::RunConfig cfg = run_config(o);
    if (report_blocking(diags, command == "compare" ? "" : dfas::to_string(cfg.engine))) return ModelFailure;

    auto t0 = std::chrono::steady_clock::now();
    dfas::Vcfg g;
    try {
        g = dfas::build_vcfg(m, o.max_nodes);
    } catch (const dfas::CapExceeded& e) {
        std::cerr << "abort: " << e.what() << "\n";
        return Abort;
    }
    spdlog::info("vcfg: {} nodes, {} edges, {} counters", g.num_nodes(), g.edges.size(), g.r());

    dfas::ojson report;
    std::vector<dfas::TraceEvent> trace;
    if (command == "compare") {
        std::vector<int> thetas = o.thetas.empty() ? std::vector<int>{o.theta} : o.thetas;
        for (int t : thetas)
            if (t < 0) throw dfas::UsageError("--theta must be non-negative");
        report = dfas::compare_report(m, g, thetas, cfg);
    } else {
        dfas::Analyzer an(g, cfg);
        if (command == "check") {
            report = dfas::check_report(m, an);
        } else {
            std::optional<std::string> target;
            if (!o.target.empty()) {
                auto dot = o.target.find('.');
                if (dot == std::string::npos) throw dfas::UsageError("--target must be process.state");
                try {
                    dfas::target_set(g, o.target.substr(0, dot), o.target.substr(dot + 1));
                } catch (const dfas::ModelError& e) {
                    throw dfas::UsageError(std::string("--target: ") + e.what());
                }
                target = o.target;
            }
            report = dfas::analyze_report(m, g, an, target);
        }
        trace = an.trace();
    }
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    spdlog::info("analysis took {:.3f} ms", ms);
    if (o.timing) report["runtime_ms"] = ms;
    if (o.trace) {
        print_trace(trace);
        if (o.json) report["trace"] = dfas::trace_json(trace);
    }

    if (o.json) std::cout << report.dump(2) << "\n";
    else print_human(report);
    return Ok;
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Dataflow analysis of asynchronous message-passing models"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool single_theta) {
        sub->add_option("model", o.model, "model file (JSON, schema version 1)")->required();
        if (single_theta) {
            sub->add_option("--engine", o.engine, "backward, forward or jop")->capture_default_str();
            sub->add_option("--domain", o.domain, "cp, lcp or ccp (default: lcp for backward, cp otherwise)");
            sub->add_option("--theta", o.theta, "queue bound for the forward engine")->capture_default_str();
            sub->add_flag("--trace", o.trace, "print retained and rejected paths to stderr");
        } else {
            sub->add_option("--theta", o.thetas, "queue bound for the forward rows (repeatable, default 2)");
        }
        sub->add_flag("--json", o.json, "print a JSON report");
        sub->add_flag("--timing", o.timing, "include wall-clock runtime in the report");
        sub->add_option("--threads", o.threads, "worker threads for the backward engine")->capture_default_str();
        sub->add_option("--max-nodes", o.max_nodes, "cap on product VCFG nodes")->capture_default_str();
        sub->add_option("--max-iters", o.max_iters, "cap on forward worklist iterations")->capture_default_str();
        sub->add_option("--max-paths", o.max_paths, "cap on retained backward paths")->capture_default_str();
    };
    auto* analyze = app.add_subcommand("analyze", "constant values at a state, or at every use");
    common(analyze, true);
    analyze->add_option("--target", o.target, "process.state to report");
    auto* check = app.add_subcommand("check", "verify the model's assertions");
    common(check, true);
    auto* compare = app.add_subcommand("compare", "constants found by every engine");
    common(compare, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return Usage;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, o);
    } catch (const dfas::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const dfas::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ModelFailure;
    } catch (const dfas::AnalysisAbort& e) {
        std::cerr << "abort: " << e.what() << "\n";
        return Abort;
    } catch (const dfas::CapExceeded& e) {
        std::cerr << "abort: " << e.what() << "\n";
        return Abort;
    }
}
