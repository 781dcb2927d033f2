#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace recert {

// All quantities per-unit unless noted. Angles are radians everywhere inside
// the library; the file boundary uses degrees (see load_scenario/save_scenario).
struct ScenarioParameters {
    double inertia = 0.0;              // M, multiplies omega_dot [s^2/rad in pu form]
    double damping = 0.0;              // D
    double internal_voltage = 0.0;     // e, generator back emf magnitude
    double transient_reactance = 0.0;  // x'_d
    double mechanical_power = 0.0;     // p_g
    double line_reactance_pre = 0.0;   // x_l before the fault
    double line_reactance_fault = 0.0; // x_l while the fault is on
    double line_reactance_post = 0.0;  // x_l after clearing
    double load_active = 0.0;          // p_dc
    double load_reactive = 0.0;        // q_dc
    double delta_max = 0.0;            // rad, protection half-width around the load equilibrium
    double omega_max = 0.0;            // rad/s, protection half-width around 0
    double v_min = 0.0;                // pu voltage band
    double v_max = 0.0;
    double synchronous_speed = 0.0;    // rad/s, used only to report Hz
    double fault_clearing = 0.0;       // s, duration of the no-load fault-on interval before t = 0
};

// Rotor state. omega is the deviation from synchronous speed in rad/s.
struct SwingState {
    double delta = 0.0; // rad
    double omega = 0.0; // rad/s
    double time = 0.0;  // s
};

class scenario_error : public std::runtime_error {
public:
    explicit scenario_error(const std::string& what) : std::runtime_error(what) {}
};

// Loads and validates a scenario JSON document. Angle-valued entries in the
// file are degrees and are converted to radians here; this is the only
// conversion layer in the library.
ScenarioParameters load_scenario(const std::filesystem::path& path);

// Serializes with the same boundary convention; load_scenario(save_scenario(p))
// reproduces every field to machine precision.
void save_scenario(const ScenarioParameters& params, const std::filesystem::path& path);

// Serialized form as a JSON string (degrees at the boundary), used to embed a
// scenario copy into every output artifact.
std::string scenario_to_json_text(const ScenarioParameters& params);

ScenarioParameters scenario_from_json_text(const std::string& text);

// Throws scenario_error naming the offending field on any constraint violation.
void validate_scenario(const ScenarioParameters& params);

} // namespace recert
