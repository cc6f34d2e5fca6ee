#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace dfas;
using testkit::pick;

namespace {

const std::vector<std::string> names{"t", "x", "y", "z"};

LcpFunction lcp(const std::string& text) { return lcp_from_action(testkit::action(text, names), names.size()); }
CcpFunction ccp(const std::string& text) { return ccp_from_action(testkit::action(text, names), names.size()); }

std::vector<const LcpFunction*> ptrs(const std::vector<LcpFunction>& fs) {
    std::vector<const LcpFunction*> out;
    for (const auto& f : fs) out.push_back(&f);
    return out;
}

// Pointwise check of f against the join of `set` on every environment over
// small constants and ⊤.
bool sampled_dominated(const LcpFunction& f, const std::vector<LcpFunction>& set, std::size_t nvars, int lo, int hi) {
    std::vector<CpVal> vals(nvars);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) {
        if (i == nvars) {
            auto e = CpEnv::of(vals);
            CpEnv j = CpEnv::bottom(nvars);
            for (const auto& g : set) j = cp_join(j, lcp_apply(g, e));
            return cp_leq(lcp_apply(f, e), j);
        }
        for (int v = lo; v <= hi + 1; ++v) {
            vals[i] = v > hi ? CpVal{} : CpVal{Int(v)};
            if (!rec(i + 1)) return false;
        }
        return true;
    };
    return rec(0);
}

} // namespace

TEST_CASE("cp join, order and transfer") {
    auto a = testkit::env({1, 2, 3, 4}), b = testkit::env({1, 5, 3, 4});
    auto j = cp_join(a, b);
    CHECK(render(j, names) == "t=1,x=⊤,y=3,z=4");
    CHECK(cp_leq(a, j));
    CHECK_FALSE(cp_leq(j, a));
    CHECK(cp_join(CpEnv::bottom(4), a) == a);
    CHECK(cp_leq(CpEnv::bottom(4), CpEnv::bottom(4)));
    CHECK(render(CpEnv::bottom(4), names) == "⊥");

    auto out = cp_transfer(testkit::action("t := x; x := x + y; z := z * t", names), a);
    CHECK(render(out, names) == "t=2,x=5,y=3,z=8");
    CHECK(cp_transfer(testkit::action("x := 1", names), CpEnv::bottom(4)) == CpEnv::bottom(4));
}

TEST_CASE("lcp transfer functions from actions") {
    CHECK(render(lcp("t := z"), names) == "t'=z,x'=x,y'=y,z'=z");
    CHECK(render(lcp("x := 2 * x - 1; y := -x"), names) == "t'=t,x'=2*x-1,y'=-2*x+1,z'=z");
    CHECK(render(lcp("x := x * y"), names) == "t'=t,x'=⊤,y'=y,z'=z");
    CHECK(render(lcp("x := 0 * y + 4"), names) == "t'=t,x'=4,y'=y,z'=z");
    CHECK(render(LcpFunction::bot(4), names) == "⊥");
    CHECK(lcp("ch ! msg") == LcpFunction::identity(4));
}

TEST_CASE("lcp composition follows the running example") {
    auto body = lcp_compose(lcp_compose(lcp_compose(lcp("t := z"), lcp("y := x")), lcp("z := 1")), lcp("x := x + 1"));
    CHECK(render(body, names) == "t'=z,x'=x+1,y'=x,z'=1");
    auto twice = lcp_compose(body, body);
    CHECK(render(twice, names) == "t'=1,x'=x+2,y'=x+1,z'=1");
    auto thrice = lcp_compose(twice, body);
    CHECK(render(thrice, names) == "t'=1,x'=x+3,y'=x+2,z'=1");
    CHECK(render(lcp_join(thrice, lcp_compose(thrice, body)), names) == "t'=1,x'=⊤,y'=⊤,z'=1");
}

TEST_CASE("lcp compose agrees with sequential application") {
    std::mt19937 rng(11);
    for (int i = 0; i < 2000; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 3));
        auto f = testkit::random_lcp(rng, n), g = testkit::random_lcp(rng, n);
        auto e = testkit::random_env(rng, n);
        CHECK(lcp_apply(lcp_compose(f, g), e) == lcp_apply(g, lcp_apply(f, e)));
    }
}

TEST_CASE("lcp and ccp transfers are distributive") {
    std::mt19937 rng(12);
    for (int i = 0; i < 2000; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 3));
        auto a = testkit::random_env(rng, n), b = testkit::random_env(rng, n);
        auto f = testkit::random_lcp(rng, n);
        CHECK(lcp_apply(f, cp_join(a, b)) == cp_join(lcp_apply(f, a), lcp_apply(f, b)));
        auto g = testkit::random_ccp(rng, n);
        CHECK(ccp_apply(g, cp_join(a, b)) == cp_join(ccp_apply(g, a), ccp_apply(g, b)));
    }
}

TEST_CASE("lcp transfers are monotone") {
    std::mt19937 rng(13);
    for (int i = 0; i < 2000; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 3));
        auto a = testkit::random_env(rng, n), b = testkit::random_env(rng, n);
        auto hi = cp_join(a, b);
        auto f = testkit::random_lcp(rng, n);
        CHECK(cp_leq(lcp_apply(f, a), lcp_apply(f, hi)));
    }
}

TEST_CASE("structural join is an upper bound and leq is a partial order") {
    std::mt19937 rng(14);
    for (int i = 0; i < 1000; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 3));
        auto f = testkit::random_lcp(rng, n), g = testkit::random_lcp(rng, n);
        auto j = lcp_join(f, g);
        CHECK(lcp_leq(f, j));
        CHECK(lcp_leq(g, j));
        CHECK(lcp_leq(f, f));
        CHECK(lcp_join(f, f) == f);
        CHECK(lcp_join(LcpFunction::bot(n), f) == f);
        if (lcp_leq(f, g) && lcp_leq(g, f)) CHECK(f == g);
        auto e = testkit::random_env(rng, n);
        CHECK(cp_leq(lcp_apply(f, e), lcp_apply(j, e)));
    }
}

TEST_CASE("ascending chains of lcp functions are short") {
    // From ⊥ to a function, then each formula at most once to ⊤.
    std::mt19937 rng(15);
    for (int i = 0; i < 200; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 3));
        auto acc = LcpFunction::bot(n);
        std::size_t rises = 0;
        for (int k = 0; k < 50; ++k) {
            auto next = lcp_join(acc, testkit::random_lcp(rng, n));
            if (!(next == acc)) ++rises;
            acc = next;
        }
        CHECK(rises <= n + 1);
    }
}

TEST_CASE("semantic dominance is finer than structural order") {
    // The structural join of x'=x and x'=5 is x'=⊤, which is above x'=x+1,
    // yet at x=5 both members give 5 while x+1 gives 6.
    auto f = LcpFunction::of({LcpFormula::affine(Int(1), 0, Int(1))});
    std::vector<LcpFunction> set{LcpFunction::identity(1), LcpFunction::of({LcpFormula::constant(Int(5))})};
    CHECK(lcp_leq(f, lcp_join(set[0], set[1])));
    CHECK_FALSE(lcp_dominated(f, ptrs(set)));
    CHECK_FALSE(sampled_dominated(f, set, 1, -8, 8));

    // x'=5 under {x'=x, x'=2x}: both members give 0 at x=0.
    std::vector<LcpFunction> lines{LcpFunction::identity(1), LcpFunction::of({LcpFormula::affine(Int(2), 0, Int(0))})};
    CHECK_FALSE(lcp_dominated(LcpFunction::of({LcpFormula::constant(Int(5))}), ptrs(lines)));
    CHECK(lcp_dominated(LcpFunction::of({LcpFormula::constant(Int(0))}), ptrs(lines)));

    // x'=x+3 under {x'=x+1, x'=x+2}: the members never agree.
    std::vector<LcpFunction> shifts{LcpFunction::of({LcpFormula::affine(Int(1), 0, Int(1))}),
                                    LcpFunction::of({LcpFormula::affine(Int(1), 0, Int(2))})};
    CHECK(lcp_dominated(LcpFunction::of({LcpFormula::affine(Int(1), 0, Int(3))}), ptrs(shifts)));

    CHECK_FALSE(lcp_dominated(f, {}));
    CHECK(lcp_dominated(LcpFunction::bot(1), {}));
}

TEST_CASE("semantic dominance matches exhaustive sampling") {
    std::mt19937 rng(16);
    int positives = 0;
    for (int i = 0; i < 3000; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 2));
        std::vector<LcpFunction> set;
        int m = pick(rng, 0, 3);
        for (int k = 0; k < m; ++k) set.push_back(testkit::random_lcp(rng, n));
        auto f = testkit::random_lcp(rng, n);
        bool sem = lcp_dominated(f, ptrs(set));
        positives += sem;
        // Coefficients and offsets are at most 2 in magnitude, so any
        // disagreement shows up on inputs in [-12, 12].
        CHECK(sem == sampled_dominated(f, set, n, -12, 12));
    }
    CHECK(positives > 100);
}

TEST_CASE("ccp functions embed into lcp") {
    CHECK(render(ccp("t := z; x := x + 1; y := x; z := 1"), names) == "t'=z,x'=⊤,y'=⊤,z'=1");
    CHECK(render(ccp("x := 2 * y"), names) == "t'=t,x'=⊤,y'=y,z'=z");
    std::mt19937 rng(17);
    for (int i = 0; i < 1000; ++i) {
        std::size_t n = static_cast<std::size_t>(pick(rng, 1, 3));
        auto f = testkit::random_ccp(rng, n), g = testkit::random_ccp(rng, n);
        CHECK(to_lcp(ccp_compose(f, g)) == lcp_compose(to_lcp(f), to_lcp(g)));
        CHECK(ccp_leq(f, g) == lcp_leq(to_lcp(f), to_lcp(g)));
        auto e = testkit::random_env(rng, n);
        CHECK(ccp_apply(f, e) == lcp_apply(to_lcp(f), e));
    }
}

TEST_CASE("ccp is never more precise than lcp on the same action") {
    std::mt19937 rng(18);
    std::vector<std::string> vs{"x", "y", "z"};
    for (int i = 0; i < 1000; ++i) {
        auto a = testkit::action(testkit::random_action(rng, vs), vs);
        auto e = testkit::random_env(rng, 3);
        CHECK(cp_leq(lcp_apply(lcp_from_action(a, 3), e), ccp_apply(ccp_from_action(a, 3), e)));
        CHECK(cp_leq(cp_transfer(a, e), lcp_apply(lcp_from_action(a, 3), e)));
    }
}

TEST_CASE("mismatched universes are rejected") {
    CHECK_THROWS_AS(ptf_of<LcpDomain>(std::vector<LcpFunction>{LcpFunction::identity(2)}, 3), DomainMismatch);
}
