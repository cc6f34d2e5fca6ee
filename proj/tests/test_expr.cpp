#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace dfas;

namespace {

const std::vector<std::string> names{"t", "x", "y", "z"};

ExprPtr parse_int(const std::string& s) {
    ExprParser p(s, resolver_for(names));
    auto e = p.parse_int();
    p.expect_end();
    return e;
}

} // namespace

TEST_CASE("expressions parse with the usual precedence") {
    CHECK(render(*parse_int("1 + 2 * x"), names) == "1 + 2 * x");
    CHECK(render(*parse_int("(1 + 2) * x"), names) == "(1 + 2) * x");
    CHECK(render(*parse_int("x - (y - z)"), names) == "x - (y - z)");
    CHECK(render(*parse_int("(x - y) - z"), names) == "x - y - z");
    CHECK(render(*parse_int("-x % 3"), names) == "-x % 3");
    auto b = parse_bool_expr("t == 1 && z == 1 || !(x < y)", resolver_for(names));
    CHECK(render(*b, names) == "t == 1 && z == 1 || !(x < y)");
}

TEST_CASE("type and syntax errors carry a column") {
    auto bad = [](const std::string& s) {
        try {
            parse_bool_expr(s, resolver_for(names));
        } catch (const SyntaxError& e) {
            return e.column();
        }
        return std::size_t{0};
    };
    CHECK(bad("x +") == 4);
    CHECK(bad("x") > 0);        // integer where a condition is needed
    CHECK(bad("x == 1 +") > 0);
    CHECK(bad("w == 1") == 1);  // unknown variable
    CHECK(bad("x == 1 )") == 8);
    CHECK_THROWS_AS(parse_int("x < 1"), SyntaxError);
}

TEST_CASE("actions are ';' separated statements") {
    auto r = resolver_for(names);
    auto a = parse_action("t := 0; x := x + 1; ch ! msg", r);
    REQUIRE(a.stmts.size() == 3);
    REQUIRE(a.send());
    CHECK(a.send()->channel == "ch");
    CHECK(a.send()->message == "msg");
    CHECK_FALSE(a.receive());
    CHECK(render(a, names) == "t := 0; x := x + 1; ch ! msg");

    auto rcv = parse_action("ch ? msg", r);
    REQUIRE(rcv.receive());
    CHECK(parse_action("skip", r).is_identity());
    CHECK(parse_action("", r).is_identity());

    auto asm_ = parse_action("assume(x > 0)", r);
    REQUIRE(asm_.stmts.size() == 1);
    CHECK(std::holds_alternative<Assume>(asm_.stmts[0]));

    CHECK_THROWS_AS(parse_action("x = 1", r), SyntaxError);
    CHECK_THROWS_AS(parse_action("q := 1", r), SyntaxError);
    CHECK_THROWS_AS(parse_action("x := x < 1", r), SyntaxError);
}

TEST_CASE("affine forms are recognised") {
    auto lin = to_linear(*parse_int("2 * (x + 3) - x"));
    REQUIRE(lin);
    CHECK(lin->coeff.at(1) == 1);
    CHECK(lin->constant == 6);
    CHECK(to_linear(*parse_int("x * y")) == std::nullopt);
    CHECK(to_linear(*parse_int("x / 2")) == std::nullopt);
    auto c = to_linear(*parse_int("7 / 2 + 7 % 2"));
    REQUIRE(c);
    CHECK(c->coeff.empty());
    CHECK(c->constant == 4);
}

TEST_CASE("constant evaluation over three-valued environments") {
    auto env = testkit::env({1, 2, 3, 4});
    env.set(3, std::nullopt);
    CHECK(cp_eval(*parse_int("x * y + t"), env) == CpVal{Int(7)});
    CHECK(cp_eval(*parse_int("z + 1"), env) == std::nullopt);
    CHECK(cp_eval(*parse_int("0 * z"), env) == CpVal{Int(0)});
    CHECK(cp_eval(*parse_int("x / 0"), env) == std::nullopt);
    CHECK(cp_eval(*parse_int("-7 / 2"), env) == CpVal{Int(-3)});
    auto r = resolver_for(names);
    CHECK(cp_eval_bool(*parse_bool_expr("z == 1 && x == 3", r), env) == std::optional<bool>(false));
    CHECK(cp_eval_bool(*parse_bool_expr("z == 1 || x == 2", r), env) == std::optional<bool>(true));
    CHECK(cp_eval_bool(*parse_bool_expr("z == 1", r), env) == std::nullopt);
}

TEST_CASE("big integers do not overflow") {
    auto e = parse_int("9223372036854775807 + 1");
    auto v = cp_eval(*e, CpEnv::top(names.size()));
    REQUIRE(v);
    CHECK(v->str() == "9223372036854775808");
}
