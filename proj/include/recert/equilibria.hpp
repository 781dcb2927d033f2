#pragma once

#include "recert/scenario.hpp"

namespace recert {

struct PrefaultEquilibrium {
    double delta_ss = 0.0; // rad
    double phi_ss = 0.0;   // rad
    double v_ss = 0.0;     // pu
    int iterations = 0;    // fixed-point iterations used
};

struct LoadEquilibrium {
    double delta_eq = 0.0; // rad
    double phi_eq = 0.0;   // rad
    double v_eq = 0.0;     // pu
};

struct EquilibriumSet {
    PrefaultEquilibrium prefault;
    double delta_eq_noload = 0.0; // rad
    LoadEquilibrium load_connected;
};

class equilibrium_error : public std::runtime_error {
public:
    explicit equilibrium_error(const std::string& what) : std::runtime_error(what) {}
};

// Pre-fault steady state by fixed-point iteration on the bus-2 voltage
// (flat start v0 = 1.0, |v_{k+1} - v_k| < 1e-10, cap 1000 iterations),
// then phi_ss and delta_ss on the principal arcsin branches.
PrefaultEquilibrium solve_prefault(const ScenarioParameters& params);

// Closed form arcsin(p_g (x'_d + x_l_post) / e), principal branch in (0, pi/2].
// Throws equilibrium_error if the argument exceeds 1 (p_g not transferable).
double no_load_equilibrium(const ScenarioParameters& params);

// Root of p_e_load(delta) - p_g on (0, pi/2): 200-subdivision bracket scan,
// bisection, then secant polish to |g| < 1e-9.
LoadEquilibrium load_connected_equilibrium(const ScenarioParameters& params);

EquilibriumSet solve_equilibria(const ScenarioParameters& params);

} // namespace recert
