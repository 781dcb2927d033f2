#pragma once

#include "recert/scenario.hpp"

#include <vector>

namespace recert {

struct Box {
    double delta_lo = 0.0; // rad
    double delta_hi = 0.0; // rad
    double omega_lo = 0.0; // rad/s
    double omega_hi = 0.0; // rad/s
};

enum class Face { delta_plus, delta_minus, omega_plus, omega_minus };

struct EnergyCertificate {
    double e_crit_pre = 0.0;
    Face binding_face = Face::delta_plus;
    double face_delta_plus = 0.0;
    double face_delta_minus = 0.0;
    double face_omega_plus = 0.0;
    double face_omega_minus = 0.0;

    double e_crit_post = 0.0;
    double binding_delta = 0.0; // rad, boundary point attaining e_crit_post
    double binding_omega = 0.0; // rad/s

    Box box;                 // protection rectangle centered at the load equilibrium
    double delta_eq_noload = 0.0;
    double delta_eq_load = 0.0;
    int face_scan_points = 0;
    int boundary_points = 0;
};

// Potential of the load-connected system: integral of p_e_load(theta) - p_g
// from delta_eq_load, cached on a dense theta grid. Nodes carry exact
// derivative values (the integrand), so queries use cubic Hermite segments:
// the interpolant is C^1 and O(h^4) accurate, which keeps numerically
// differenced energies clean at small dt.
class PostPotential {
public:
    // half_width: cached range around delta_eq_load; node_step: grid spacing.
    PostPotential(const ScenarioParameters& params, double delta_eq_load,
                  double half_width, double node_step);

    // Convenience: half-width 60 deg, node step 0.01 deg.
    PostPotential(const ScenarioParameters& params, double delta_eq_load);

    // Throws std::domain_error outside the cached range.
    double operator()(double delta) const;

    double delta_eq() const { return delta_eq_; }
    double range_lo() const { return lo_; }
    double range_hi() const { return lo_ + step_ * static_cast<double>(count_ - 1); }

private:
    double delta_eq_ = 0.0;
    double lo_ = 0.0;
    double step_ = 0.0;
    std::size_t count_ = 0;
    std::vector<double> values_;      // cumulative integral at nodes
    std::vector<double> derivatives_; // integrand at nodes
};

// Closed-form no-load potential anchored at the no-load equilibrium:
// -(e/(x'_d+x_l_post)) (cos d - cos d_nl) - p_g (d - d_nl).
double potential_pre(const ScenarioParameters& params, double delta);

double energy_pre(const ScenarioParameters& params, const SwingState& state);

double energy_post(const ScenarioParameters& params, const PostPotential& potential,
                   const SwingState& state);

// Both critical energies over the protection box centered at the load
// equilibrium. face_scan_points samples each omega face's outward subset;
// boundary_points samples the admissible-set boundary for e_crit_post.
EnergyCertificate compute_certificate(const ScenarioParameters& params,
                                      int face_scan_points = 2000,
                                      int boundary_points = 4000);

EnergyCertificate compute_certificate(const ScenarioParameters& params,
                                      const PostPotential& potential,
                                      int face_scan_points = 2000,
                                      int boundary_points = 4000);

} // namespace recert
