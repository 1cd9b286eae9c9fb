#include <doctest.h>

#include <cmath>

#include "gravistate/certify.hpp"

using namespace grav;

TEST_CASE("number parsing accepts fractions") {
    CHECK(parse_number("2/3") == 2.0 / 3);
    CHECK(parse_number("-1/3") == -1.0 / 3);
    CHECK(parse_number("0.25") == 0.25);
    CHECK_THROWS_AS(parse_number("abc"), ConfigError);
    CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
    const auto p = parse_triple("2/3,2/3,-1/3");
    CHECK(kasner_conditions_hold(p, 1e-12));
    CHECK_THROWS_AS(parse_triple("1,2"), ConfigError);
    CHECK(parse_mode("1,0,-2") == IVec3{1, 0, -2});
    CHECK_THROWS_AS(parse_mode("1.5,0,0"), ConfigError);
}

TEST_CASE("config validation") {
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.geometry = "kasner";
    c.p = parse_triple("0.6667,0.6667,-0.3334");
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.p = {1.0, 0.0, 0.0};
    CHECK_NOTHROW(c.validate());
    c.kmax = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.geometry = "de-sitter";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.interval = {0.1, 0.5};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.kmax = 1;
    c.R = 1.8;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config JSON: keys, fractions and the canonical echo") {
    RunConfig c;
    apply_json(c, nlohmann::json::parse(R"({"geometry": "kasner", "p": ["2/3", "2/3", "-1/3"], "kmax": 4, "jobs": 3})"));
    CHECK(c.geometry == "kasner");
    CHECK(c.p[2] == -1.0 / 3);
    CHECK(c.kmax == 4);
    CHECK(c.jobs == 3);
    CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"kmaxx": 4})")), ConfigError);
    // the echo carries what changes results, not how the run was executed
    RunConfig d = c;
    d.jobs = 1;
    d.out = "elsewhere.json";
    d.timings = true;
    CHECK(c.echo() == d.echo());
    d.R = 1.7;
    CHECK(c.echo() != d.echo());
}

TEST_CASE("doubles are written with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1.0");
    CHECK(format_double(1.0 / 3) == "0.33333333333333331");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");  // %g drops trailing zeros
    CHECK(format_double(std::nan("")) == "\"nan\"");
    CHECK(format_double(-INFINITY) == "\"-inf\"");
}

TEST_CASE("conditions compare as declared") {
    CHECK(Condition::check("a", "", 1e-10, "lt", 1e-9).pass);
    CHECK(!Condition::check("a", "", 1e-9, "lt", 1e-9).pass);
    CHECK(Condition::check("a", "", 1e-9, "le", 1e-9).pass);
    CHECK(Condition::check("a", "", -1e-12, "ge", -1e-11).pass);
    CHECK(!Condition::check("a", "", std::nan(""), "gt", 4).pass);
    CHECK(Condition::check("a", "", 0, "eq", 0).pass);
    CHECK_THROWS(Condition::check("a", "", 0, "approx", 0));
}

TEST_CASE("report round trip") {
    StateReport r;
    r.geometry = {{"kind", "kasner"}, {"p", {2.0 / 3, 2.0 / 3, -1.0 / 3}}};
    r.config = RunConfig{}.echo();
    r.case_tag = "singular";
    r.add(Condition::check("ccr", "lambda+ - lambda- = q", 3.3320268732701417e-16, "lt", 1e-9));
    r.add(Condition::check("fit", "exponent", 5.36037136547415, "gt", 4));
    r.add(Condition::info("exp", "fewer than two shells", std::nan("")));
    r.add(Condition::info("cl", "control", INFINITY));
    r.add(Condition::check("pos", "min eigenvalue", -6.4e-16, "ge", -1e-9));
    r.notes = {"surrogate only"};
    r.timings = {{"model", 2.5}, {"total", 7.125}};
    const std::string text = emit(r);
    const StateReport back = parse_report(text);
    CHECK(same(r, back));
    CHECK(emit(back) == text);
    CHECK(r.passed());
    r.add(Condition::check("bad", "", 1, "lt", 0));
    CHECK(!r.passed());
    REQUIRE(r.first_failure() != nullptr);
    CHECK(r.first_failure()->name == "bad");
    CHECK(!same(r, back));
}

TEST_CASE("verify on a non-Einstein background stops after the Einstein check") {
    RunConfig c;
    c.geometry = "custom-sin";
    c.kmax = 1;
    Pipeline P(c);
    const StateReport r = certify(P);
    REQUIRE(r.conditions.size() == 1);
    CHECK(r.conditions[0].name == "einstein");
    CHECK(!r.passed());
    CHECK(r.case_tag.empty());
}

TEST_CASE("verify is bitwise reproducible across worker counts") {
    RunConfig c;
    c.kmax = 1;
    c.jobs = 1;
    Pipeline a(c);
    c.jobs = 3;
    Pipeline b(c);
    const std::string ra = emit(certify(a)), rb = emit(certify(b));
    CHECK(ra == rb);
    CHECK(parse_report(ra).passed());
    CHECK(parse_report(ra).case_tag == "singular");
}
