#pragma once

#include "recert/energy_certificates.hpp"
#include "recert/scenario.hpp"
#include "recert/swing_dynamics.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace recert {

struct SafeSetGrid {
    int resolution = 0;              // cells per axis
    std::vector<double> delta_axis;  // cell centers, rad
    std::vector<double> omega_axis;  // cell centers, rad/s
    std::vector<std::uint8_t> in_pre;  // row-major: [i_delta * resolution + i_omega]
    std::vector<std::uint8_t> in_post;
    std::vector<std::uint8_t> in_adm;
    std::vector<std::uint8_t> in_safe;
    double safe_fraction = 0.0;      // safe cells / admissible cells
};

struct AuditSample {
    double time = 0.0;
    bool in_safe = false;
};

struct ReconnectionDecision {
    double t_star = 0.0;
    SwingState switch_state;
    double omega_at_switch = 0.0;
    bool entered_safe = false;
    std::vector<AuditSample> audit; // samples over [t_star, t_star + 5 s]
};

struct ReconnectionRun {
    Trajectory fault_on; // empty when fault_clearing = 0
    Trajectory waiting;
    Trajectory post;
    bool flapped = false; // any post-switch protection/voltage violation
};

// Admissibility per the protection limits: |delta - delta_eq_load| <= delta_max,
// |omega| <= omega_max, v_min <= v_post(delta) <= v_max. An infeasible load bus
// is not admissible.
bool admissible(const ScenarioParameters& params, double delta_eq_load, const SwingState& state);

// Full safe-set membership: admissible, E_pre <= e_crit_pre (non-strict),
// E_post < e_crit_post (strict).
bool in_safe_set(const ScenarioParameters& params, const EnergyCertificate& certificate,
                 const PostPotential& potential, const SwingState& state);

// Classifies cell centers of a resolution x resolution lattice over the
// protection box. Cells are evaluated independently (data-parallel).
SafeSetGrid classify_grid(const ScenarioParameters& params, const EnergyCertificate& certificate,
                          const PostPotential& potential, int resolution);

// Scans the dt-sampled waiting trajectory (from cleared_state, or from
// `start` when given) and returns the first sample passing all three
// membership tests, evaluated analytically, never through a grid. The audit
// re-tests membership at every subsequent sample up to t_star + 5 s.
ReconnectionDecision earliest_reconnection(const ScenarioParameters& params,
                                           const EnergyCertificate& certificate,
                                           const PostPotential& potential, double dt,
                                           double horizon = 10.0,
                                           std::optional<SwingState> start = std::nullopt);

// Integrates the fault_on stage, the waiting stage up to t_reconnect, switches
// with state continuity, and integrates the reconnected mode to t_end past the
// switch. flapped mirrors the post trajectory's violation list.
ReconnectionRun simulate_reconnection(const ScenarioParameters& params, double t_reconnect,
                                      double t_end, double dt);

} // namespace recert
