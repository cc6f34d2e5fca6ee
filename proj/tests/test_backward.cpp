#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace dfas;

namespace {

std::vector<std::vector<int>> path_vectors(const Vcfg& g, const std::vector<std::string>& nodes) {
    std::vector<std::vector<int>> out;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        int a = g.node(nodes[i]), b = g.node(nodes[i + 1]);
        bool found = false;
        for (int ei : g.out[static_cast<std::size_t>(a)]) {
            const auto& e = g.edges[static_cast<std::size_t>(ei)];
            if (e.to == b && !found) {
                out.push_back(e.w);
                found = true;
            }
        }
        REQUIRE(found);
    }
    return out;
}

std::string p_path(int i) {
    std::string s;
    auto add = [&](const char* n) { s += (s.empty() ? "foo:" : " foo:") + std::string(n); };
    for (int k = 0; k < i; ++k)
        for (auto n : {"c", "d", "e", "f", "g", "m"}) add(n);
    add("c");
    add("o");
    for (int k = 0; k < i; ++k) {
        add("n");
        add("o");
    }
    return s;
}

std::vector<std::string> summary_paths(BackwardEngine<LcpDomain>& eng, const Vec& d) {
    std::vector<std::string> out;
    for (const auto& p : eng.end_to_end("foo", d)) {
        std::string s;
        for (const auto& n : p->nodes) s += (s.empty() ? "" : " ") + n;
        out.push_back(s);
    }
    return out;
}

// Never reports a path as covered, so every path is new.
struct Counting {
    using Transfer = LcpFunction;
    static constexpr std::string_view name = "counting";
    static Transfer lift(const Action& a, std::size_t n) { return LcpDomain::lift(a, n); }
    static CpEnv apply(const Transfer& f, const CpEnv& e) { return LcpDomain::apply(f, e); }
    static Transfer identity(std::size_t n) { return LcpDomain::identity(n); }
    static Transfer compose(const Transfer& f, const Transfer& g) { return LcpDomain::compose(f, g); }
    static Transfer join(const Transfer& f, const Transfer& g) { return LcpDomain::join(f, g); }
    static bool leq(const Transfer& f, const Transfer& g) { return LcpDomain::leq(f, g); }
    static bool dominated(const Transfer&, const std::vector<const Transfer*>&) { return false; }
    static std::string render(const Transfer& f, const std::vector<std::string>& n) { return LcpDomain::render(f, n); }
};

} // namespace

TEST_CASE("demand of paths in the running examples") {
    auto a = testkit::load("running_example_a");
    CHECK(demand(path_vectors(a.g, {"h", "i", "j", "k"}), {0}) == Vec{3});
    CHECK(demand(path_vectors(a.g, {"c", "d", "e", "f", "g", "c", "h", "i", "j", "k"}), {0}) == Vec{2});
    CHECK(demand(path_vectors(a.g, {"a", "b", "c", "d", "e", "f", "g", "c", "d"}), {0}) == Vec{0});
    CHECK(demand({{0, 0}, {0, 0}}, {2, 5}) == Vec{2, 5});
    CHECK(demand({{1, -1}}, {1, 0}) == Vec{0, 1});

    auto b = testkit::load("running_example_b");
    CHECK(demand(path_vectors(b.g, {"q", "h", "i", "j", "k"}), {0}) == Vec{3});
}

TEST_CASE("supply is the clamped sum of a receive-free path") {
    CHECK(supply({{1}, {0}, {1}, {1}, {1}}, {3}) == Vec{3});
    CHECK(supply({{0}, {0}}, {3}) == Vec{0});
    CHECK(supply({{1, 0}, {0, 1}}, {0, 5}) == Vec{0, 1});
    CHECK_THROWS_AS(supply({{1}, {-1}}, {3}), std::invalid_argument);
}

TEST_CASE("backward lcp on running example A") {
    auto a = testkit::load("running_example_a");
    auto ag = attach_domain<LcpDomain>(a.g);
    auto r = backward_jofp(ag, {a.g.node("k")}, a.g.initial_env());
    CHECK(render(r.value, a.g.var_names) == "t=1,x=⊤,y=⊤,z=1");
    CHECK(r.stats.retained > 0);
    CHECK(r.stats.rejected > 0);

    // ccp loses x but keeps the copies and constants that matter here
    auto ac = attach_domain<CcpDomain>(a.g);
    CHECK(render(backward_jofp(ac, {a.g.node("k")}, a.g.initial_env()).value, a.g.var_names) == "t=1,x=⊤,y=⊤,z=1");

    // c is reached with 0, 1, 2, ... unrollings; x differs between them
    auto c = backward_jofp(ag, {a.g.node("c")}, a.g.initial_env()).value;
    CHECK(render(c, a.g.var_names) == "t=⊤,x=⊤,y=⊤,z=⊤");
    CHECK(backward_jofp(ag, {a.g.node("a")}, a.g.initial_env()).value == a.g.initial_env());
}

TEST_CASE("backward lcp on running example B") {
    auto b = testkit::load("running_example_b");
    auto ag = attach_domain<LcpDomain>(b.g);
    auto k = backward_jofp(ag, {b.g.node("k")}, b.g.initial_env()).value;
    CHECK(render(k, b.g.var_names) == "t=1,x=⊤,y=⊤,z=1");
    // l follows k, so the same facts hold
    CHECK(backward_jofp(ag, {b.g.node("l")}, b.g.initial_env()).value == k);
}

TEST_CASE("end-to-end summaries of foo") {
    auto b = testkit::load("running_example_b");
    auto ag = attach_domain<LcpDomain>(b.g);
    BackwardEngine<LcpDomain> eng(ag);
    CHECK(summary_paths(eng, {3}) == std::vector<std::string>{p_path(0), p_path(1), p_path(2), p_path(3), p_path(4)});
    // With nothing demanded, supply is clamped to zero everywhere and paths
    // are kept until their join dominates: after p0..p2 every formula is
    // either a constant or a disagreement.
    CHECK(summary_paths(eng, {0}) == std::vector<std::string>{p_path(0), p_path(1), p_path(2)});
    const auto& s = eng.end_to_end("foo", {3});
    CHECK(LcpDomain::render(s[3]->ptf, b.g.var_names) == "t'=1,x'=x+3,y'=x+2,z'=1");
    CHECK(s[3]->sum == Vec{3});
}

TEST_CASE("covering checks from the illustration") {
    auto a = testkit::load("running_example_a");
    std::size_t n = a.g.nvars();
    auto id = LcpFunction::identity(n);
    CHECK(LcpDomain::dominated(id, {&id}));
    CHECK_FALSE(LcpDomain::dominated(id, {}));

    auto body = lcp_from_action(testkit::action("t := z; y := x; z := 1; x := x + 1", a.g.var_names), n);
    auto pow = [&](int k) {
        auto f = LcpFunction::identity(n);
        for (int i = 0; i < k; ++i) f = lcp_compose(f, body);
        return f;
    };
    auto p3 = pow(3), p4 = pow(4), p5 = pow(5);
    CHECK(LcpDomain::dominated(p5, {&p3, &p4}));
    CHECK_FALSE(LcpDomain::dominated(p5, {&p4}));
}

TEST_CASE("a non-terminating join trips the watchdog") {
    auto a = testkit::load("running_example_a");
    auto ag = attach_domain<Counting>(a.g);
    CHECK_THROWS_AS(backward_jofp(ag, {a.g.node("k")}, a.g.initial_env()), AnalysisAbort);
}

TEST_CASE("the retained-path cap aborts") {
    auto a = testkit::load("running_example_a");
    auto ag = attach_domain<LcpDomain>(a.g);
    BackwardOptions opt;
    opt.max_paths = 5;
    CHECK_THROWS_AS(backward_jofp(ag, {a.g.node("k")}, a.g.initial_env(), opt), AnalysisAbort);
}

TEST_CASE("threads do not change the result") {
    auto m = testkit::load("mutex");
    auto ag = attach_domain<LcpDomain>(m.g);
    auto targets = target_set(m.g, "P1", "cs");
    REQUIRE(targets.size() > 1);
    BackwardOptions one, four;
    four.threads = 4;
    auto r1 = backward_jofp(ag, targets, m.g.initial_env(), one);
    auto r4 = backward_jofp(ag, targets, m.g.initial_env(), four);
    CHECK(r1.value == r4.value);
    CHECK(r1.stats.retained == r4.stats.retained);
    CHECK(render(r1.value, m.g.var_names) == "in_cs=1");
}

TEST_CASE("every retained path is feasible-consistent") {
    // Retained paths at the start with zero demand are feasible: replaying
    // their counters from zero never goes negative.
    std::mt19937 rng(5);
    for (int i = 0; i < 50; ++i) {
        auto g = testkit::random_vcfg(rng);
        auto ag = attach_domain<LcpDomain>(g);
        BackwardEngine<LcpDomain> eng(ag);
        int target = testkit::pick(rng, 0, static_cast<int>(g.num_nodes()) - 1);
        eng.jofp(target, g.initial_env());
        for (const auto& p : eng.paths_at(g.start)) {
            Vec c = zero_vec(g.r());
            bool ok = true;
            for (const auto* cell = p.get(); cell; cell = cell->rest.get()) {
                const auto& w = g.edges[static_cast<std::size_t>(cell->edge)].w;
                for (std::size_t k = 0; k < c.size(); ++k) {
                    c[k] += w[k];
                    ok = ok && c[k] >= 0;
                }
            }
            bool zero = std::all_of(p->demand.begin(), p->demand.end(), [](auto x) { return x == 0; });
            CHECK(ok == zero);
        }
    }
}
