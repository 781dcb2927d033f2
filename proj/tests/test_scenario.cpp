#include <catch2/catch_amalgamated.hpp>

#include "recert/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using namespace recert;

namespace {
const std::filesystem::path golden_path = RECERT_TABLE1_JSON;
constexpr double kPi = std::numbers::pi;
} // namespace

TEST_CASE("golden scenario loads with degree conversion at the boundary", "[scenario]") {
    const ScenarioParameters p = load_scenario(golden_path);

    CHECK(p.inertia == Approx(0.0146));
    CHECK(p.damping == Approx(0.05));
    CHECK(p.internal_voltage == Approx(1.05));
    CHECK(p.transient_reactance == Approx(0.3));
    CHECK(p.mechanical_power == Approx(0.8));
    CHECK(p.line_reactance_pre == Approx(0.4));
    CHECK(p.line_reactance_fault == Approx(5.0));
    CHECK(p.line_reactance_post == Approx(0.5));
    CHECK(p.load_active == Approx(0.5));
    CHECK(p.load_reactive == Approx(0.2));
    CHECK(p.delta_max == Approx(30.0 * kPi / 180.0));
    CHECK(p.omega_max == Approx(2.0));
    CHECK(p.v_min == Approx(0.9));
    CHECK(p.v_max == Approx(1.1));
    CHECK(p.synchronous_speed == Approx(2.0 * kPi * 60.0));
    CHECK(p.fault_clearing == Approx(0.098));
}

TEST_CASE("save/load round trip preserves every field", "[scenario]") {
    const ScenarioParameters p = load_scenario(golden_path);
    const auto tmp = std::filesystem::temp_directory_path() / "recert_scenario_roundtrip.json";
    save_scenario(p, tmp);
    const ScenarioParameters q = load_scenario(tmp);
    std::filesystem::remove(tmp);

    CHECK(q.inertia == p.inertia);
    CHECK(q.damping == p.damping);
    CHECK(q.internal_voltage == p.internal_voltage);
    CHECK(q.transient_reactance == p.transient_reactance);
    CHECK(q.mechanical_power == p.mechanical_power);
    CHECK(q.line_reactance_pre == p.line_reactance_pre);
    CHECK(q.line_reactance_fault == p.line_reactance_fault);
    CHECK(q.line_reactance_post == p.line_reactance_post);
    CHECK(q.load_active == p.load_active);
    CHECK(q.load_reactive == p.load_reactive);
    CHECK(q.delta_max == Approx(p.delta_max).margin(1e-15));
    CHECK(q.omega_max == p.omega_max);
    CHECK(q.v_min == p.v_min);
    CHECK(q.v_max == p.v_max);
    CHECK(q.synchronous_speed == p.synchronous_speed);
    CHECK(q.fault_clearing == p.fault_clearing);
}

TEST_CASE("json text round trip", "[scenario]") {
    const ScenarioParameters p = load_scenario(golden_path);
    const ScenarioParameters q = scenario_from_json_text(scenario_to_json_text(p));
    CHECK(q.delta_max == Approx(p.delta_max).margin(1e-15));
    CHECK(q.fault_clearing == p.fault_clearing);
    CHECK(q.inertia == p.inertia);
}

TEST_CASE("missing file and malformed document are input errors", "[scenario]") {
    CHECK_THROWS_AS(load_scenario("/no/such/scenario.json"), scenario_error);
    CHECK_THROWS_WITH(load_scenario("/no/such/scenario.json"),
                      ContainsSubstring("/no/such/scenario.json"));
    CHECK_THROWS_AS(scenario_from_json_text("{ not json"), scenario_error);
}

TEST_CASE("missing required key is reported by name", "[scenario]") {
    CHECK_THROWS_WITH(scenario_from_json_text("{\"inertia\": 0.0146}"),
                      ContainsSubstring("damping"));
}

TEST_CASE("fault_clearing is optional and defaults to zero", "[scenario]") {
    ScenarioParameters p = load_scenario(golden_path);
    p.fault_clearing = 0.0;
    std::string text = scenario_to_json_text(p);
    const auto pos = text.find("\"fault_clearing\"");
    REQUIRE(pos != std::string::npos);
    // Strip the key so the parser has to fall back to the default.
    const auto end = text.find_first_of(",}", pos);
    text.erase(pos, end - pos + (text[end] == ',' ? 1 : 0));
    const ScenarioParameters q = scenario_from_json_text(text);
    CHECK(q.fault_clearing == 0.0);
}

TEST_CASE("validation names the offending field", "[scenario]") {
    const ScenarioParameters good = load_scenario(golden_path);

    ScenarioParameters p = good;
    p.inertia = -1.0;
    CHECK_THROWS_WITH(validate_scenario(p), ContainsSubstring("inertia"));

    p = good;
    p.omega_max = 0.0;
    CHECK_THROWS_WITH(validate_scenario(p), ContainsSubstring("omega_max"));

    p = good;
    p.v_min = 1.2; // above v_max
    CHECK_THROWS_WITH(validate_scenario(p), ContainsSubstring("v_min"));

    p = good;
    p.fault_clearing = -0.1;
    CHECK_THROWS_WITH(validate_scenario(p), ContainsSubstring("fault_clearing"));

    p = good;
    p.line_reactance_fault = 0.0;
    CHECK_THROWS_WITH(validate_scenario(p), ContainsSubstring("line_reactance_fault"));
}
