#include <cmath>
#include <string>

#include "doctest.h"
#include "gridsim/config.hpp"
#include "gridsim/errors.hpp"

using namespace gridsim;

TEST_CASE("the default configuration carries the built-in sweep") {
    const auto c = config::default_run_config();
    REQUIRE(c.pl_list.size() == 7);
    CHECK(c.pl_list.front() == 0.0);
    CHECK(c.pl_list.back() == 300.0);
    CHECK(c.scenarios == 100);
    CHECK(c.dt == 0.1);
    CHECK(c.horizon_days == 1);
    CHECK(c.tco.capital_cost == 4575.0);
    CHECK(c.feeder.nodes.size() == 13);

    // The vehicle allocation is explicit, sums to one, and pins a small
    // share at the monitored transformer's node.
    double sum = 0.0;
    double xfmr_share = -1.0;
    for (const auto& [node, w] : c.charging.allocation) {
        sum += w;
        if (node == c.feeder.transformer_node) xfmr_share = w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(xfmr_share == doctest::Approx(0.006).epsilon(1e-12));
}

TEST_CASE("an empty document yields the defaults") {
    const auto parsed = config::parse_run_config("{}");
    const auto defaults = config::default_run_config();
    CHECK(parsed.pl_list == defaults.pl_list);
    CHECK(parsed.scenarios == defaults.scenarios);
    CHECK(parsed.root_seed == defaults.root_seed);
    CHECK(parsed.dt == defaults.dt);
    CHECK(parsed.charging.allocation == defaults.charging.allocation);
    CHECK(parsed.feeder == defaults.feeder);
}

TEST_CASE("serialization round-trips to the identical document") {
    const auto c = config::default_run_config();
    const std::string text = config::to_json_string(c);
    const auto back = config::parse_run_config(text);
    CHECK(config::to_json_string(back) == text);
}

TEST_CASE("section overrides land in the right fields") {
    const auto c = config::parse_run_config(R"({
        "run": {"scenarios": 7, "pl_list": [150], "root_seed": 99, "dt": 0.5},
        "thermal": {"tau_oil_h": 4.0},
        "regulator": {"operating_cycle_h": 1.0},
        "tco": {"interest": 0.07},
        "charging": {"charging_kw": 7.2}
    })");
    CHECK(c.scenarios == 7);
    REQUIRE(c.pl_list.size() == 1);
    CHECK(c.pl_list[0] == 150.0);
    CHECK(c.root_seed == 99);
    CHECK(c.dt == 0.5);
    CHECK(c.thermal.tau_to == 4.0);
    CHECK(c.regulator.operating_cycle == 1.0);
    CHECK(c.tco.interest == 0.07);
    CHECK(c.charging.charging_kw == 7.2);
}

TEST_CASE("a named builtin feeder and an inline model both parse") {
    const auto named = config::parse_run_config(R"({"feeder": "builtin"})");
    CHECK(named.feeder == config::default_run_config().feeder);

    const std::string inline_model = config::to_json_string(config::default_run_config());
    CHECK_NOTHROW(config::parse_run_config(inline_model));

    CHECK_THROWS_AS(config::parse_run_config(R"({"feeder": "atlantis"})"), ConfigError);
}

TEST_CASE("unknown sections and keys are reported by name") {
    try {
        config::parse_run_config(R"({"runn": {}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("runn") != std::string::npos);
    }
    try {
        config::parse_run_config(R"({"run": {"dtt": 0.1}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run.dtt") != std::string::npos);
    }
}

TEST_CASE("every invalid value is listed in one error") {
    try {
        config::parse_run_config(R"({"run": {"dt": 0.7, "scenarios": 0}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("run.dt") != std::string::npos);
        CHECK(msg.find("run.scenarios") != std::string::npos);
    }
}

TEST_CASE("type mismatches name the offending key") {
    try {
        config::parse_run_config(R"({"tco": {"interest": "high"}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("tco.interest") != std::string::npos);
    }
}

TEST_CASE("interval mode strings map to the sampling modes") {
    const auto soc = config::parse_run_config(R"({"charging": {"interval_mode": "soc_driven"}})");
    CHECK(soc.charging.interval_mode == pev::IntervalMode::SocDriven);
    const auto gauss = config::parse_run_config(R"({"charging": {"interval_mode": "gaussian"}})");
    CHECK(gauss.charging.interval_mode == pev::IntervalMode::Gaussian);
    CHECK_THROWS_AS(config::parse_run_config(R"({"charging": {"interval_mode": "fixed"}})"),
                    ConfigError);
}

TEST_CASE("non-JSON input is rejected with a parse error") {
    CHECK_THROWS_AS(config::parse_run_config("not json at all"), ConfigError);
    CHECK_THROWS_AS(config::parse_run_config("[1, 2, 3]"), ConfigError);
}

TEST_CASE("a cross-module inconsistency is caught at validation") {
    // dt larger than the regulator's operating cycle cannot be scheduled.
    try {
        config::parse_run_config(R"({"run": {"dt": 1.0}, "regulator": {"operating_cycle_h": 0.5}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("operating_cycle") != std::string::npos);
    }
}
