#pragma once

// Shared fixtures for the unit tests and the acceptance runner.

#include <random>
#include <string>
#include <vector>

#include "dfas/dfas.hpp"

namespace testkit {

inline std::string model_path(const std::string& name) { return std::string(DFAS_MODEL_DIR) + "/" + name + ".json"; }

struct Loaded {
    dfas::Model model;
    dfas::Vcfg g;
};

inline Loaded load(const std::string& name) {
    Loaded l{dfas::load_model(model_path(name)), {}};
    l.g = dfas::build_vcfg(l.model);
    return l;
}

inline dfas::Action action(const std::string& text, const std::vector<std::string>& names) {
    return dfas::parse_action(text, dfas::resolver_for(names));
}

inline dfas::CpEnv env(std::initializer_list<long> vals) {
    std::vector<dfas::Int> v;
    for (long x : vals) v.emplace_back(x);
    return dfas::CpEnv::constants(v);
}

inline int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// Straight-line action text drawn from the affine fragment.
inline std::string random_action(std::mt19937& rng, const std::vector<std::string>& names) {
    if (names.empty() || pick(rng, 0, 4) == 0) return "skip";
    const auto& x = names[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(names.size()) - 1))];
    const auto& y = names[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(names.size()) - 1))];
    switch (pick(rng, 0, 4)) {
    case 0: return x + " := " + std::to_string(pick(rng, -2, 3));
    case 1: return x + " := " + y;
    case 2: return x + " := " + x + " + " + std::to_string(pick(rng, 1, 2));
    case 3: return x + " := " + std::to_string(pick(rng, -2, 3)) + " * " + y + " + " + std::to_string(pick(rng, -1, 2));
    default: return x + " := " + y + " - " + std::to_string(pick(rng, 0, 2));
    }
}

// Procedure-free VCFG: up to `max_nodes` nodes, r counters, nvars variables.
// Node 0 is the start; every node is reachable from it ignoring counters.
inline dfas::Vcfg random_vcfg(std::mt19937& rng, int max_nodes = 8, int max_r = 2, int max_vars = 3) {
    dfas::Vcfg g;
    int n = pick(rng, 2, max_nodes);
    int r = pick(rng, 0, max_r);
    int nv = pick(rng, 1, max_vars);
    for (int i = 0; i < nv; ++i) {
        g.var_names.push_back(std::string(1, static_cast<char>('x' + i)));
        g.init.emplace_back(pick(rng, 0, 2));
    }
    for (int i = 0; i < r; ++i) g.counters.push_back({"c" + std::to_string(i), "m"});
    for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
    g.start = 0;
    auto add = [&](int a, int b) {
        dfas::VEdge e;
        e.from = a;
        e.to = b;
        std::string text = random_action(rng, g.var_names);
        e.action = action(text, g.var_names);
        e.label = text;
        e.w.assign(static_cast<std::size_t>(r), 0);
        if (r > 0 && pick(rng, 0, 2) != 0) {
            auto c = static_cast<std::size_t>(pick(rng, 0, r - 1));
            e.w[c] = pick(rng, 0, 1) ? 1 : -1;
        }
        g.add_edge(std::move(e));
    };
    for (int i = 1; i < n; ++i) add(pick(rng, 0, i - 1), i);
    int extra = pick(rng, 1, n + 2);
    for (int i = 0; i < extra; ++i) add(pick(rng, 0, n - 1), pick(rng, 0, n - 1));
    return g;
}

// Random path as a list of queuing vectors.
inline std::vector<std::vector<int>> random_vectors(std::mt19937& rng, std::size_t r, int max_len, bool receives = true) {
    std::vector<std::vector<int>> p(static_cast<std::size_t>(pick(rng, 0, max_len)));
    for (auto& w : p) {
        w.assign(r, 0);
        for (auto& x : w) x = receives ? pick(rng, -2, 2) : pick(rng, 0, 2);
    }
    return p;
}

inline std::vector<std::vector<int>> concat(std::vector<std::vector<int>> a, const std::vector<std::vector<int>>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline dfas::LcpFunction random_lcp(std::mt19937& rng, std::size_t nvars) {
    std::vector<dfas::LcpFormula> fs;
    for (std::size_t i = 0; i < nvars; ++i) {
        switch (pick(rng, 0, 5)) {
        case 0: fs.push_back(dfas::LcpFormula::constant(pick(rng, -2, 2))); break;
        case 1: fs.push_back(dfas::LcpFormula::top()); break;
        case 2: fs.push_back(dfas::LcpFormula::copy(pick(rng, 0, static_cast<int>(nvars) - 1))); break;
        default:
            fs.push_back(dfas::LcpFormula::affine(pick(rng, -2, 2), pick(rng, 0, static_cast<int>(nvars) - 1),
                                                  pick(rng, -2, 2)));
        }
    }
    return dfas::LcpFunction::of(std::move(fs));
}

inline dfas::CcpFunction random_ccp(std::mt19937& rng, std::size_t nvars) {
    std::vector<dfas::CcpFormula> fs;
    for (std::size_t i = 0; i < nvars; ++i) {
        switch (pick(rng, 0, 2)) {
        case 0: fs.push_back(dfas::CcpFormula::constant(pick(rng, -2, 2))); break;
        case 1: fs.push_back(dfas::CcpFormula::top()); break;
        default: fs.push_back(dfas::CcpFormula::copy(pick(rng, 0, static_cast<int>(nvars) - 1)));
        }
    }
    return dfas::CcpFunction::of(std::move(fs));
}

// Environment with small constants, occasional ⊤, occasionally ⊥.
inline dfas::CpEnv random_env(std::mt19937& rng, std::size_t nvars, bool allow_bottom = true) {
    if (allow_bottom && pick(rng, 0, 9) == 0) return dfas::CpEnv::bottom(nvars);
    std::vector<dfas::CpVal> vals;
    for (std::size_t i = 0; i < nvars; ++i) {
        if (pick(rng, 0, 4) == 0) vals.emplace_back(std::nullopt);
        else vals.emplace_back(dfas::Int(pick(rng, -3, 3)));
    }
    return dfas::CpEnv::of(vals);
}

} // namespace testkit
