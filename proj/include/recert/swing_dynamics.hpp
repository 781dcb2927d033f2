#pragma once

#include "recert/scenario.hpp"

#include <string>
#include <vector>

namespace recert {

// Hybrid modes. fault_on is the no-load swing over the faulted line; it models
// the interval between load disconnection and fault clearing.
enum class Mode { fault_on, waiting, reconnected };

struct Derivative {
    double d_delta = 0.0;
    double d_omega = 0.0;
};

struct Violation {
    double time = 0.0;
    std::string limit; // "delta", "omega", "voltage", "infeasible"
};

struct Trajectory {
    std::vector<SwingState> samples; // uniform step dt, one per integrator step
    Mode mode = Mode::waiting;
    std::vector<Violation> violations;
};

class integration_error : public std::runtime_error {
public:
    integration_error(const std::string& what, SwingState at)
        : std::runtime_error(what), state(at) {}
    SwingState state;
};

// No-load swing over the post-clearing line: M w' = p_g - (e/(x'_d+x_l_post)) sin d - D w.
Derivative rhs_waiting(const ScenarioParameters& params, const SwingState& state);

// No-load swing over the faulted line (same form with x_l_fault).
Derivative rhs_fault(const ScenarioParameters& params, const SwingState& state);

// Load-connected swing: M w' = p_g - p_e_load(d) - D w, the load-bus algebra
// solved fresh at the instantaneous delta. Throws integration_error when the
// load bus is infeasible at delta.
Derivative rhs_reconnected(const ScenarioParameters& params, const SwingState& state);

// Classical fixed-step 4th-order integration over `duration` seconds from
// `initial`, recording every step. Protection-bound violations are recorded
// per sample; the voltage band is additionally checked in reconnected mode.
Trajectory integrate(const ScenarioParameters& params, SwingState initial, Mode mode,
                     double dt, double duration);

// State at fault clearing: the fault_on mode integrated over fault_clearing
// seconds from the pre-fault equilibrium (delta_ss, 0). With fault_clearing = 0
// this is (delta_ss, 0) itself. The returned time stamp is 0 (the clearing
// instant defines t = 0).
SwingState cleared_state(const ScenarioParameters& params, double dt);

// Convenience: the waiting trajectory from cleared_state over [0, duration].
Trajectory waiting_trajectory(const ScenarioParameters& params, double dt, double duration);

} // namespace recert
