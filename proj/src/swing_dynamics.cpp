#include "recert/swing_dynamics.hpp"

#include "recert/equilibria.hpp"
#include "recert/network_algebra.hpp"

#include <cmath>

namespace recert {
namespace {

double no_load_torque(const ScenarioParameters& params, double delta, double xl) {
    return params.mechanical_power -
           params.internal_voltage / (params.transient_reactance + xl) * std::sin(delta);
}

Derivative rhs(const ScenarioParameters& params, const SwingState& state, Mode mode) {
    switch (mode) {
    case Mode::waiting:
        return rhs_waiting(params, state);
    case Mode::fault_on:
        return rhs_fault(params, state);
    case Mode::reconnected:
    default:
        return rhs_reconnected(params, state);
    }
}

SwingState rk4_step(const ScenarioParameters& params, const SwingState& x, Mode mode, double dt) {
    const Derivative k1 = rhs(params, x, mode);
    const SwingState x2{x.delta + 0.5 * dt * k1.d_delta, x.omega + 0.5 * dt * k1.d_omega, x.time};
    const Derivative k2 = rhs(params, x2, mode);
    const SwingState x3{x.delta + 0.5 * dt * k2.d_delta, x.omega + 0.5 * dt * k2.d_omega, x.time};
    const Derivative k3 = rhs(params, x3, mode);
    const SwingState x4{x.delta + dt * k3.d_delta, x.omega + dt * k3.d_omega, x.time};
    const Derivative k4 = rhs(params, x4, mode);
    SwingState next;
    next.delta = x.delta + dt / 6.0 * (k1.d_delta + 2.0 * k2.d_delta + 2.0 * k3.d_delta + k4.d_delta);
    next.omega = x.omega + dt / 6.0 * (k1.d_omega + 2.0 * k2.d_omega + 2.0 * k3.d_omega + k4.d_omega);
    next.time = x.time + dt;
    return next;
}

} // namespace

Derivative rhs_waiting(const ScenarioParameters& params, const SwingState& state) {
    return {state.omega,
            (no_load_torque(params, state.delta, params.line_reactance_post) -
             params.damping * state.omega) /
                params.inertia};
}

Derivative rhs_fault(const ScenarioParameters& params, const SwingState& state) {
    return {state.omega,
            (no_load_torque(params, state.delta, params.line_reactance_fault) -
             params.damping * state.omega) /
                params.inertia};
}

Derivative rhs_reconnected(const ScenarioParameters& params, const SwingState& state) {
    const LoadBusSolution bus = post_state_voltage(params, state.delta);
    if (!bus.feasible) {
        throw integration_error("load bus infeasible during reconnected integration", state);
    }
    const double pe = electrical_power(params, bus, state.delta);
    return {state.omega,
            (params.mechanical_power - pe - params.damping * state.omega) / params.inertia};
}

Trajectory integrate(const ScenarioParameters& params, SwingState initial, Mode mode, double dt,
                     double duration) {
    if (dt <= 0.0) {
        throw std::invalid_argument("integration step dt must be positive");
    }
    if (duration < 0.0) {
        throw std::invalid_argument("integration duration must be nonnegative");
    }
    const auto steps = static_cast<std::size_t>(std::llround(duration / dt));

    // Violation checks use the protection box centered at the load equilibrium.
    const double delta_center = load_connected_equilibrium(params).delta_eq;

    Trajectory traj;
    traj.mode = mode;
    traj.samples.reserve(steps + 1);

    auto record = [&](const SwingState& s) {
        if (!std::isfinite(s.delta) || !std::isfinite(s.omega)) {
            throw integration_error("non-finite state during integration", s);
        }
        traj.samples.push_back(s);
        if (std::abs(s.delta - delta_center) > params.delta_max) {
            traj.violations.push_back({s.time, "delta"});
        }
        if (std::abs(s.omega) > params.omega_max) {
            traj.violations.push_back({s.time, "omega"});
        }
        if (mode == Mode::reconnected) {
            const LoadBusSolution bus = post_state_voltage(params, s.delta);
            if (!bus.feasible) {
                traj.violations.push_back({s.time, "infeasible"});
            } else if (bus.v < params.v_min || bus.v > params.v_max) {
                traj.violations.push_back({s.time, "voltage"});
            }
        }
    };

    record(initial);
    SwingState x = initial;
    for (std::size_t i = 0; i < steps; ++i) {
        // A pole slip can drive the load bus infeasible mid-step; the
        // trajectory is then truncated at the last valid sample with the
        // failure recorded, so callers still get a usable verdict.
        try {
            x = rk4_step(params, x, mode, dt);
        } catch (const integration_error&) {
            traj.violations.push_back({x.time, "infeasible"});
            break;
        }
        x.time = initial.time + static_cast<double>(i + 1) * dt;
        record(x);
    }
    return traj;
}

SwingState cleared_state(const ScenarioParameters& params, double dt) {
    const PrefaultEquilibrium pre = solve_prefault(params);
    SwingState x{pre.delta_ss, 0.0, -params.fault_clearing};
    if (params.fault_clearing > 0.0) {
        const Trajectory fault = integrate(params, x, Mode::fault_on, dt, params.fault_clearing);
        x = fault.samples.back();
    }
    x.time = 0.0; // the clearing instant defines t = 0
    return x;
}

Trajectory waiting_trajectory(const ScenarioParameters& params, double dt, double duration) {
    return integrate(params, cleared_state(params, dt), Mode::waiting, dt, duration);
}

} // namespace recert
