#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace dfas;

namespace {

RunConfig cfg(Engine e, const std::string& dom, int theta = 2) {
    RunConfig c;
    c.engine = e;
    c.domain = dom;
    c.theta = theta;
    return c;
}

} // namespace

TEST_CASE("analyze report for a target") {
    auto a = testkit::load("running_example_a");
    Analyzer an(a.g, cfg(Engine::Backward, "lcp"));
    auto r = analyze_report(a.model, a.g, an, std::string("P.k"));
    CHECK(r["command"] == "analyze");
    CHECK(r["target"]["nodes"] == ojson::array({"k"}));
    CHECK(r["target"]["values"].dump() == R"({"t":1,"x":"⊤","y":"⊤","z":1})");

    Analyzer fw(a.g, cfg(Engine::Forward, "cp", 2));
    auto f = analyze_report(a.model, a.g, fw, std::string("P.k"));
    CHECK(f["config"].dump() == R"({"engine":"forward","domain":"cp","theta":2})");
    CHECK(f["target"]["values"].dump() == R"({"t":"⊤","x":"⊤","y":"⊤","z":1})");

    Analyzer jop(a.g, cfg(Engine::Jop, "cp"));
    CHECK(analyze_report(a.model, a.g, jop, std::string("P.k"))["target"]["values"].dump() ==
          R"({"t":"⊤","x":"⊤","y":"⊤","z":"⊤"})");
}

TEST_CASE("findings cover every use in declaration order") {
    auto a = testkit::load("running_example_a");
    auto uses = collect_uses(a.model);
    std::vector<std::string> where;
    for (const auto& u : uses) where.push_back(u.state);
    CHECK(where == std::vector<std::string>{"d", "e", "g", "k"});
    Analyzer an(a.g, cfg(Engine::Backward, "lcp"));
    auto fs = findings(a.model, an);
    REQUIRE(fs.size() == 5);
    CHECK(constant_set(fs) == std::set<Finding>{{"P", "k", "t", "1"}, {"P", "k", "z", "1"}});
}

TEST_CASE("assertion verdicts") {
    auto a = testkit::load("running_example_a");
    const auto& as = a.model.assertions.at(0);
    CHECK(verdict(as, testkit::env({1, 0, 0, 1})) == Verdict::Verified);
    CHECK(verdict(as, testkit::env({1, 0, 0, 2})) == Verdict::Unknown);
    auto top = testkit::env({1, 0, 0, 1});
    top.set(0, std::nullopt);
    CHECK(verdict(as, top) == Verdict::Unknown);
    CHECK(verdict(as, CpEnv::bottom(4)) == Verdict::Verified);

    auto m = testkit::load("mutex");
    Analyzer lcp(m.g, cfg(Engine::Backward, "lcp"));
    CHECK(check_report(m.model, lcp)["verified"] == 2);
    Analyzer fwd(m.g, cfg(Engine::Forward, "cp", 2));
    CHECK(check_report(m.model, fwd)["verified"] == 2);
    Analyzer ccp(m.g, cfg(Engine::Backward, "ccp"));
    CHECK(check_report(m.model, ccp)["verified"] == 0);
    Analyzer jop(m.g, cfg(Engine::Jop, "cp"));
    CHECK(check_report(m.model, jop)["verified"] == 0);

    auto none = parse_model(R"({"schema_version": 1, "variables": [],
        "processes": [{"name": "P", "states": ["a"], "transitions": []}]})");
    auto g = build_vcfg(none);
    Analyzer an(g, cfg(Engine::Backward, "lcp"));
    auto r = check_report(none, an);
    CHECK(r["assertions"].empty());
    CHECK(r["total"] == 0);
}

TEST_CASE("compare table") {
    auto a = testkit::load("running_example_a");
    auto r = compare_report(a.model, a.g, {0, 2, 3}, RunConfig{});
    std::vector<std::size_t> forward;
    std::size_t backward = 0;
    for (const auto& row : r["rows"]) {
        if (row["engine"] == "forward") forward.push_back(row["constants"].get<std::size_t>());
        if (row["engine"] == "backward" && row["domain"] == "lcp") backward = row["constants"].get<std::size_t>();
    }
    CHECK(forward == std::vector<std::size_t>{0, 1, 2});
    CHECK(backward == 2);

    auto b = testkit::load("running_example_b");
    auto rb = compare_report(b.model, b.g, {2}, RunConfig{});
    for (const auto& row : rb["rows"])
        if (row["engine"] != "backward") CHECK(row["status"] == "unsupported (procedures)");

    // Without receives every engine sees the same paths.
    auto m = parse_model(R"({"schema_version": 1, "channels": ["ch"], "messages": ["m"], "variables": [{"name": "x", "init": 0}],
        "processes": [{"name": "P", "states": ["a", "b"], "transitions": [
            {"from": "a", "to": "b", "action": "x := 2; ch ! m"}, {"from": "b", "to": "b", "action": "x := x"}]}]})");
    auto g = build_vcfg(m);
    std::set<std::size_t> counts;
    auto rm = compare_report(m, g, {0, 1, 2}, RunConfig{});
    for (const auto& row : rm["rows"])
        counts.insert(row["constants"].get<std::size_t>());
    CHECK(counts.size() == 1);
}

TEST_CASE("usage errors") {
    auto a = testkit::load("running_example_a");
    CHECK_THROWS_AS(Analyzer(a.g, cfg(Engine::Backward, "cp")), UsageError);
    CHECK_THROWS_AS(Analyzer(a.g, cfg(Engine::Forward, "octagon")), UsageError);
    CHECK_THROWS_AS(parse_engine("sideways"), UsageError);
    auto b = testkit::load("running_example_b");
    CHECK_THROWS_AS(Analyzer(b.g, cfg(Engine::Forward, "cp")), UsageError);
    Analyzer an(a.g, cfg(Engine::Backward, "lcp"));
    CHECK_THROWS_AS(analyze_report(a.model, a.g, an, std::string("Pk")), UsageError);
}

TEST_CASE("reports are deterministic") {
    for (const auto& name : {"running_example_a", "running_example_b", "two_process", "mutex"}) {
        auto l = testkit::load(name);
        auto once = [&] {
            Analyzer an(l.g, cfg(Engine::Backward, "lcp"));
            return analyze_report(l.model, l.g, an, std::nullopt).dump(2) + check_report(l.model, an).dump(2) +
                   compare_report(l.model, l.g, {0, 2}, RunConfig{}).dump(2);
        };
        CHECK(once() == once());
    }
}

TEST_CASE("trace events serialize") {
    auto a = testkit::load("running_example_a");
    auto c = cfg(Engine::Backward, "lcp");
    c.trace = true;
    Analyzer an(a.g, c);
    an.at("P", "k");
    auto j = trace_json(an.trace());
    REQUIRE(!j.empty());
    CHECK(j[0]["event"] == "retained");
    CHECK(j[0]["path"] == "j k");
    CHECK(j[0]["demand"] == ojson::array({1}));
    bool rejected = false;
    for (const auto& ev : j) rejected = rejected || (ev["event"] == "rejected" && ev.contains("covered_by"));
    CHECK(rejected);
}
