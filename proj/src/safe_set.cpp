#include "recert/safe_set.hpp"

#include "recert/equilibria.hpp"
#include "recert/network_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <thread>
#include <vector>

namespace recert {

namespace {
constexpr double kAuditWindow = 5.0; // seconds of waiting orbit re-tested after t_star
}

bool admissible(const ScenarioParameters& params, double delta_eq_load, const SwingState& state) {
    if (std::abs(state.delta - delta_eq_load) > params.delta_max) {
        return false;
    }
    if (std::abs(state.omega) > params.omega_max) {
        return false;
    }
    const LoadBusSolution bus = post_state_voltage(params, state.delta);
    return bus.feasible && bus.v >= params.v_min && bus.v <= params.v_max;
}

bool in_safe_set(const ScenarioParameters& params, const EnergyCertificate& cert,
                 const PostPotential& potential, const SwingState& state) {
    if (std::abs(state.delta - cert.delta_eq_load) > params.delta_max ||
        std::abs(state.omega) > params.omega_max) {
        return false;
    }
    if (energy_pre(params, state) > cert.e_crit_pre) {
        return false;
    }
    if (energy_post(params, potential, state) >= cert.e_crit_post) {
        return false;
    }
    const LoadBusSolution bus = post_state_voltage(params, state.delta);
    return bus.feasible && bus.v >= params.v_min && bus.v <= params.v_max;
}

SafeSetGrid classify_grid(const ScenarioParameters& params, const EnergyCertificate& cert,
                          const PostPotential& potential, int resolution) {
    SafeSetGrid grid;
    grid.resolution = resolution;
    const auto n = static_cast<std::size_t>(resolution);
    const double d_delta = (cert.box.delta_hi - cert.box.delta_lo) / resolution;
    const double d_omega = (cert.box.omega_hi - cert.box.omega_lo) / resolution;
    grid.delta_axis.resize(n);
    grid.omega_axis.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid.delta_axis[i] = cert.box.delta_lo + (static_cast<double>(i) + 0.5) * d_delta;
        grid.omega_axis[i] = cert.box.omega_lo + (static_cast<double>(i) + 0.5) * d_omega;
    }
    grid.in_pre.assign(n * n, 0);
    grid.in_post.assign(n * n, 0);
    grid.in_adm.assign(n * n, 0);
    grid.in_safe.assign(n * n, 0);

    auto classify_rows = [&](std::size_t row_begin, std::size_t row_end) {
        for (std::size_t i = row_begin; i < row_end; ++i) {
            const double delta = grid.delta_axis[i];
            const LoadBusSolution bus = post_state_voltage(params, delta);
            const bool voltage_ok =
                bus.feasible && bus.v >= params.v_min && bus.v <= params.v_max;
            const double phi_value = potential(delta);
            const double phi_pre_value = potential_pre(params, delta);
            for (std::size_t j = 0; j < n; ++j) {
                const double omega = grid.omega_axis[j];
                const double kinetic = 0.5 * params.inertia * omega * omega;
                const std::size_t idx = i * n + j;
                const bool pre_ok = kinetic + phi_pre_value <= cert.e_crit_pre;
                const bool post_ok = kinetic + phi_value < cert.e_crit_post;
                grid.in_pre[idx] = pre_ok ? 1 : 0;
                grid.in_post[idx] = post_ok ? 1 : 0;
                grid.in_adm[idx] = voltage_ok ? 1 : 0; // cell centers lie inside the box
                grid.in_safe[idx] = (pre_ok && post_ok && voltage_ok) ? 1 : 0;
            }
        }
    };

    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        pool.emplace_back(classify_rows, begin, end);
    }
    for (auto& t : pool) {
        t.join();
    }

    std::size_t safe_cells = 0;
    std::size_t adm_cells = 0;
    for (std::size_t idx = 0; idx < n * n; ++idx) {
        safe_cells += grid.in_safe[idx];
        adm_cells += grid.in_adm[idx];
    }
    grid.safe_fraction =
        adm_cells == 0 ? 0.0 : static_cast<double>(safe_cells) / static_cast<double>(adm_cells);
    return grid;
}

ReconnectionDecision earliest_reconnection(const ScenarioParameters& params,
                                           const EnergyCertificate& cert,
                                           const PostPotential& potential, double dt,
                                           double horizon, std::optional<SwingState> start) {
    ReconnectionDecision decision;
    decision.entered_safe = false;
    decision.t_star = std::numeric_limits<double>::quiet_NaN();

    const SwingState initial = start ? *start : cleared_state(params, dt);
    Trajectory waiting = integrate(params, initial, Mode::waiting, dt, horizon);
    std::size_t hit = waiting.samples.size();
    for (std::size_t k = 0; k < waiting.samples.size(); ++k) {
        if (in_safe_set(params, cert, potential, waiting.samples[k])) {
            hit = k;
            break;
        }
    }
    if (hit == waiting.samples.size()) {
        return decision;
    }
    decision.entered_safe = true;
    decision.t_star = waiting.samples[hit].time;
    decision.switch_state = waiting.samples[hit];
    decision.omega_at_switch = waiting.samples[hit].omega;

    // The audit keeps the load disconnected: it re-tests membership at every
    // later waiting sample through t_star + kAuditWindow, probing whether the
    // certified window would still be open had the switch been postponed.
    const auto window_steps = static_cast<std::size_t>(std::llround(kAuditWindow / dt));
    const std::size_t last = hit + window_steps;
    if (waiting.samples.size() <= last) {
        const std::size_t missing = last + 1 - waiting.samples.size();
        const Trajectory extension = integrate(params, waiting.samples.back(), Mode::waiting, dt,
                                               static_cast<double>(missing) * dt);
        waiting.samples.insert(waiting.samples.end(), extension.samples.begin() + 1,
                               extension.samples.end());
    }
    decision.audit.reserve(window_steps + 1);
    for (std::size_t k = hit; k < waiting.samples.size() && k <= last; ++k) {
        decision.audit.push_back(
            {waiting.samples[k].time, in_safe_set(params, cert, potential, waiting.samples[k])});
    }
    return decision;
}

ReconnectionRun simulate_reconnection(const ScenarioParameters& params, double t_reconnect,
                                      double t_end, double dt) {
    ReconnectionRun run;
    const PrefaultEquilibrium pre = solve_prefault(params);
    const double t0 = params.fault_clearing > 0.0 ? -params.fault_clearing : 0.0;
    const SwingState fault_start{pre.delta_ss, 0.0, t0};
    run.fault_on = integrate(params, fault_start, Mode::fault_on, dt, params.fault_clearing);
    run.fault_on.samples.back().time = 0.0; // the last fault sample is the clearing instant

    SwingState cleared = run.fault_on.samples.back();
    run.waiting = integrate(params, cleared, Mode::waiting, dt, t_reconnect);

    const SwingState switch_state =
        run.waiting.samples.empty() ? cleared : run.waiting.samples.back();
    const double post_span = std::max(t_end - t_reconnect, 0.0);
    run.post = integrate(params, switch_state, Mode::reconnected, dt, post_span);
    run.flapped = !run.post.violations.empty();
    return run;
}

} // namespace recert
