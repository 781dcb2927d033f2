#pragma once

#include "recert/scenario.hpp"

namespace recert {

enum class Topology { fault, post };

// One-port reduction of generator + line as seen from the load bus.
struct TheveninEquivalent {
    double source_real = 0.0;   // Re(e_eq)
    double source_imag = 0.0;   // Im(e_eq)
    double x_eq = 0.0;          // x'_d x_l / (x'_d + x_l)
    double source_angle = 0.0;  // rad
    double source_mag_sq = 0.0; // |e_eq|^2
};

// Constant-PQ load-bus solution. Infeasibility (negative discriminant) is a
// returned state, not an error: grid scans legitimately probe such points.
struct LoadBusSolution {
    double v = 0.0;            // pu, high root
    double phi = 0.0;          // rad, bus-2 voltage angle
    double discriminant = 0.0; // pu^4
    bool feasible = false;
};

TheveninEquivalent reduce_network(const ScenarioParameters& params, double delta, Topology topology);

LoadBusSolution solve_load_bus(const TheveninEquivalent& thev, double p_dc, double q_dc);

// Load-bus solve under the fault topology; reports the sag that triggers disconnection.
LoadBusSolution fault_state_voltage(const ScenarioParameters& params, double delta);

// Load-bus solve under the post-clearing topology with the scenario's load.
LoadBusSolution post_state_voltage(const ScenarioParameters& params, double delta);

// Generator electrical power (e v / x'_d) sin(delta - phi) for a feasible solution.
double electrical_power(const ScenarioParameters& params, const LoadBusSolution& bus, double delta);

// Electrical power of the load-connected post topology as a function of delta.
// Throws std::domain_error if the load bus is infeasible at this angle.
double electrical_power_load(const ScenarioParameters& params, double delta);

} // namespace recert
