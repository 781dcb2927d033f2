#include <catch2/catch_amalgamated.hpp>

#include "recert/equilibria.hpp"
#include "recert/network_algebra.hpp"
#include "recert/scenario.hpp"

#include <cmath>
#include <numbers>

using Catch::Approx;
using namespace recert;

namespace {
const ScenarioParameters params = load_scenario(RECERT_TABLE1_JSON);
constexpr double kDeg = std::numbers::pi / 180.0;

// Residuals of the bus-2 power balance and the generator power at the
// pre-fault operating point (pre-fault line reactance).
struct Residuals {
    double active;
    double reactive;
    double generator;
};

Residuals prefault_residuals(const ScenarioParameters& p, double delta, double phi, double v) {
    const double xl = p.line_reactance_pre;
    const double xd = p.transient_reactance;
    const double e = p.internal_voltage;
    const double active = -p.load_active -
                          (e * v * std::sin(phi - delta) / xd + v * std::sin(phi) / xl);
    const double reactive = -p.load_reactive -
                            ((v * v - e * v * std::cos(phi - delta)) / xd +
                             (v * v - v * std::cos(phi)) / xl);
    const double generator = p.mechanical_power - e * v * std::sin(delta - phi) / xd;
    return {active, reactive, generator};
}
} // namespace

TEST_CASE("pre-fault fixed point", "[equilibria]") {
    const PrefaultEquilibrium eq = solve_prefault(params);
    CHECK(eq.delta_ss == Approx(20.664521 * kDeg).margin(1e-8));
    CHECK(eq.phi_ss == Approx(7.082161 * kDeg).margin(1e-8));
    CHECK(eq.v_ss == Approx(0.973295166).margin(1e-8));
    CHECK(eq.iterations > 0);
    CHECK(eq.iterations < 1000);
}

TEST_CASE("pre-fault point satisfies the full power-balance system", "[equilibria]") {
    const PrefaultEquilibrium eq = solve_prefault(params);
    const Residuals r = prefault_residuals(params, eq.delta_ss, eq.phi_ss, eq.v_ss);
    CHECK(std::abs(r.active) < 1e-8);
    CHECK(std::abs(r.reactive) < 1e-8);
    CHECK(std::abs(r.generator) < 1e-8);
}

TEST_CASE("no-load equilibrium is the closed-form arcsine", "[equilibria]") {
    const double delta_nl = no_load_equilibrium(params);
    CHECK(delta_nl == Approx(0.655459784).margin(1e-9));
    CHECK(delta_nl == Approx(37.555079 * kDeg).margin(1e-8));
    CHECK(std::sin(delta_nl) == Approx(0.8 * 0.8 / 1.05).margin(1e-12));
}

TEST_CASE("no-load equilibrium rejects untransferable mechanical power", "[equilibria]") {
    ScenarioParameters p = params;
    p.mechanical_power = 1.4; // p_g (x'_d + x_l) / e > 1
    CHECK_THROWS_AS(no_load_equilibrium(p), equilibrium_error);
}

TEST_CASE("load-connected equilibrium", "[equilibria]") {
    const LoadEquilibrium eq = load_connected_equilibrium(params);
    CHECK(eq.delta_eq == Approx(0.380126141).margin(1e-8));
    CHECK(eq.delta_eq == Approx(21.779624 * kDeg).margin(1e-7));
    CHECK(eq.phi_eq == Approx(9.156992 * kDeg).margin(1e-6));
    CHECK(eq.v_eq == Approx(1.045956052).margin(1e-7));
    // The root actually balances the electrical power.
    CHECK(electrical_power_load(params, eq.delta_eq) ==
          Approx(params.mechanical_power).margin(1e-9));
}

TEST_CASE("connected equilibrium is stable: restoring torque slope", "[equilibria]") {
    const LoadEquilibrium eq = load_connected_equilibrium(params);
    const double h = 1e-6;
    const double slope = (electrical_power_load(params, eq.delta_eq + h) -
                          electrical_power_load(params, eq.delta_eq - h)) /
                         (2.0 * h);
    CHECK(slope > 0.0);
}

TEST_CASE("solve_equilibria bundles the three operating points consistently", "[equilibria]") {
    const EquilibriumSet all = solve_equilibria(params);
    CHECK(all.prefault.delta_ss == solve_prefault(params).delta_ss);
    CHECK(all.delta_eq_noload == no_load_equilibrium(params));
    CHECK(all.load_connected.delta_eq == load_connected_equilibrium(params).delta_eq);
    // Ordering of the three angles for this scenario.
    CHECK(all.prefault.delta_ss < all.load_connected.delta_eq);
    CHECK(all.load_connected.delta_eq < all.delta_eq_noload);
}

TEST_CASE("load matching generation puts no flow on the infinite-bus line", "[equilibria]") {
    ScenarioParameters p = params;
    p.load_active = p.mechanical_power;
    const PrefaultEquilibrium eq = solve_prefault(p);
    CHECK(std::abs(eq.phi_ss) < 1e-12);
    CHECK(eq.v_ss > 0.9);
}
