#include "doctest.h"

#include "qeilab/config.hpp"

#include <string>

using namespace qeilab::cli;

namespace {

bool throws_mentioning(const std::string& text, const std::string& needle) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("empty object yields the documented defaults") {
    const RunConfig cfg = parse_config_text("{}");
    CHECK(!cfg.analysis_specified);
    CHECK(cfg.analysis == Analysis::TowerReport);
    CHECK(cfg.seed == 0);
    CHECK(cfg.output.dir == "out");
    CHECK(cfg.output.prefix == "run");
    CHECK(!cfg.output.plots);
    CHECK(cfg.test_function.support_radius == 1.0);
    CHECK(cfg.test_function.beta0 == 1.0);
    CHECK(cfg.tower.kind == "arithmetic");
    CHECK(cfg.constants.d == 4);
    CHECK(cfg.grids.beta.size() == 5);
    CHECK(cfg.negstate.m0 == 0.5);
    CHECK(cfg.negstate.mc_samples == 200000);
    CHECK(cfg.distal.lambda == 2.0);
}

TEST_CASE("analysis names round-trip and unknown names are rejected") {
    for (Analysis a : {Analysis::TowerReport, Analysis::QeiReport, Analysis::NegstateVerify,
                       Analysis::TestfnBuild, Analysis::DistalDemo})
        CHECK(parse_analysis(analysis_name(a)) == a);
    CHECK(analysis_name(Analysis::QeiReport) == "qei-report");
    CHECK_THROWS_AS(parse_analysis("frobnicate"), ConfigError);

    const RunConfig cfg = parse_config_text(R"({"analysis": "distal-demo"})");
    CHECK(cfg.analysis_specified);
    CHECK(cfg.analysis == Analysis::DistalDemo);
}

TEST_CASE("unknown keys are rejected with their section named") {
    CHECK(throws_mentioning(R"({"bogus": 1})", "bogus"));
    CHECK(throws_mentioning(R"({"tower": {"kind": "arithmetic", "m2": 1}})", "m2"));
    CHECK(throws_mentioning(R"({"tower": {"kind": "arithmetic", "m2": 1}})", "tower"));
    CHECK(throws_mentioning(R"({"output": {"folder": "x"}})", "output"));
    CHECK(throws_mentioning(R"({"negstate": {"radial": {"centre": 0.75}}})", "radial"));
}

TEST_CASE("malformed JSON and type mismatches raise config errors") {
    CHECK_THROWS_AS(parse_config_text("{"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[]"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"seed": -3})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"seed": "seven"})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"output": {"plots": "yes"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"grids": {"beta": [0.5, "x"]}})"), ConfigError);
}

TEST_CASE("module invariants are validated at parse time") {
    CHECK(throws_mentioning(R"({"tower": {"kind": "arithmetic", "m1": 0}})", "mass gap"));
    CHECK_THROWS_AS(parse_config_text(R"({"tower": {"kind": "volcanic"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"tower": {"kind": "finite", "masses": []}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"tower": {"kind": "finite", "masses": [2.0, 1.0]}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"test_function": {"support_radius": -1}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"test_function": {"shape": "triangle"}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"constants": {"d": 1}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"grids": {"beta": [1.0, 1.0]}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"grids": {"beta": [-1.0, 1.0]}})"), ConfigError);
    CHECK(throws_mentioning(R"({"negstate": {"radial": {"center": 0.2, "halfwidth": 0.1}}})",
                            "negstate"));
    CHECK_THROWS_AS(parse_config_text(R"({"negstate": {"m0": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"distal": {"lambda": 0.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"distal": {"iterations": 0}})"), ConfigError);
}

TEST_CASE("valid sections land in the typed spec") {
    const RunConfig cfg = parse_config_text(R"({
        "analysis": "tower-report",
        "seed": 42,
        "output": {"dir": "results", "prefix": "t", "plots": true},
        "tower": {"kind": "logarithmic", "d0": 2.5},
        "grids": {"beta": [0.5, 1.0], "u": [1.0, 2.0, 3.0]},
        "constants": {"C": 2.0, "R": 3.0}
    })");
    CHECK(cfg.seed == 42);
    CHECK(cfg.output.plots);
    CHECK(cfg.tower.kind == "logarithmic");
    CHECK(cfg.tower.d0 == 2.5);
    CHECK(cfg.grids.beta == std::vector<double>{0.5, 1.0});
    CHECK(cfg.grids.u == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(cfg.constants.C == 2.0);
    CHECK(cfg.constants.R == 3.0);

    const qeilab::tower::MassTower t = build_tower(cfg.tower);
    CHECK(t.kind() == qeilab::tower::MassTower::Kind::Logarithmic);
    CHECK(t.d0() == 2.5);
}

TEST_CASE("missing files are a config error naming the path") {
    try {
        parse_config("/nonexistent/qeilab-config.json");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("qeilab-config.json") != std::string::npos);
    }
}

}  // TEST_SUITE
