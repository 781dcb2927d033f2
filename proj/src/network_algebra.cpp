#include "recert/network_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace recert {

TheveninEquivalent reduce_network(const ScenarioParameters& params, double delta,
                                  Topology topology) {
    const double xd = params.transient_reactance;
    const double xl = topology == Topology::fault ? params.line_reactance_fault
                                                  : params.line_reactance_post;
    const double e = params.internal_voltage;
    const double denom = xd + xl;

    TheveninEquivalent thev;
    thev.source_real = (xl * e * std::cos(delta) + xd) / denom;
    thev.source_imag = (xl * e * std::sin(delta)) / denom;
    thev.x_eq = xd * xl / denom;
    thev.source_angle = std::atan2(thev.source_imag, thev.source_real);
    thev.source_mag_sq = thev.source_real * thev.source_real +
                         thev.source_imag * thev.source_imag;
    return thev;
}

LoadBusSolution solve_load_bus(const TheveninEquivalent& thev, double p_dc, double q_dc) {
    LoadBusSolution sol;
    const double a = thev.source_mag_sq + 2.0 * thev.x_eq * q_dc;
    sol.discriminant = a * a - 4.0 * thev.x_eq * thev.x_eq * (p_dc * p_dc + q_dc * q_dc);
    sol.feasible = sol.discriminant >= 0.0;
    if (!sol.feasible) {
        return sol;
    }
    const double v_sq = 0.5 * (a + std::sqrt(sol.discriminant)); // high root
    sol.v = std::sqrt(v_sq);
    // Thevenin phasor identity: e_eq = (e^{j phi}/v)(v^2 + Xq + jXp), so the
    // bus angle is the source angle minus the angle of (v^2 + Xq + jXp).
    sol.phi = thev.source_angle - std::atan2(thev.x_eq * p_dc, v_sq + thev.x_eq * q_dc);
    return sol;
}

LoadBusSolution fault_state_voltage(const ScenarioParameters& params, double delta) {
    return solve_load_bus(reduce_network(params, delta, Topology::fault), params.load_active,
                          params.load_reactive);
}

LoadBusSolution post_state_voltage(const ScenarioParameters& params, double delta) {
    return solve_load_bus(reduce_network(params, delta, Topology::post), params.load_active,
                          params.load_reactive);
}

double electrical_power(const ScenarioParameters& params, const LoadBusSolution& bus,
                        double delta) {
    return params.internal_voltage * bus.v / params.transient_reactance *
           std::sin(delta - bus.phi);
}

double electrical_power_load(const ScenarioParameters& params, double delta) {
    const LoadBusSolution bus = post_state_voltage(params, delta);
    if (!bus.feasible) {
        throw std::domain_error("load bus infeasible at delta = " + std::to_string(delta));
    }
    return electrical_power(params, bus, delta);
}

} // namespace recert
