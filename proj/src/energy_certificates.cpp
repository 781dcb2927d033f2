#include "recert/energy_certificates.hpp"

#include "recert/equilibria.hpp"
#include "recert/network_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace recert {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDefaultHalfWidth = 60.0 * std::numbers::pi / 180.0;
constexpr double kDefaultNodeStep = 0.01 * std::numbers::pi / 180.0;

double no_load_power(const ScenarioParameters& params, double delta) {
    return params.internal_voltage /
           (params.transient_reactance + params.line_reactance_post) * std::sin(delta);
}

// Integrand of the post potential; throws on infeasible nodes.
double post_integrand(const ScenarioParameters& params, double delta) {
    return electrical_power_load(params, delta) - params.mechanical_power;
}

// Bisects f to a sign change inside [a, b]; f(a) and f(b) must differ in sign.
template <typename F>
double bisect(F&& f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fa * fm <= 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

PostPotential::PostPotential(const ScenarioParameters& params, double delta_eq_load,
                             double half_width, double node_step)
    : delta_eq_(delta_eq_load), step_(node_step) {
    if (half_width <= 0.0 || node_step <= 0.0) {
        throw std::invalid_argument("post potential grid must have positive extent and step");
    }
    const auto half_count = static_cast<std::size_t>(std::ceil(half_width / node_step));
    lo_ = delta_eq_load - static_cast<double>(half_count) * node_step; // delta_eq is a node
    count_ = 2 * half_count + 1;

    values_.resize(count_);
    derivatives_.resize(count_);
    for (std::size_t i = 0; i < count_; ++i) {
        derivatives_[i] = post_integrand(params, lo_ + static_cast<double>(i) * step_);
    }
    // Cumulative composite Simpson, one midpoint evaluation per segment.
    values_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < count_; ++i) {
        const double a = lo_ + static_cast<double>(i) * step_;
        const double mid_value = post_integrand(params, a + 0.5 * step_);
        values_[i + 1] = values_[i] +
                         step_ / 6.0 * (derivatives_[i] + 4.0 * mid_value + derivatives_[i + 1]);
    }
    const double anchor = values_[half_count];
    for (double& v : values_) {
        v -= anchor;
    }
}

PostPotential::PostPotential(const ScenarioParameters& params, double delta_eq_load)
    : PostPotential(params, delta_eq_load, kDefaultHalfWidth, kDefaultNodeStep) {}

double PostPotential::operator()(double delta) const {
    const double pos = (delta - lo_) / step_;
    if (pos < 0.0 || pos > static_cast<double>(count_ - 1)) {
        throw std::domain_error("post potential queried outside its cached range");
    }
    auto i = static_cast<std::size_t>(pos);
    if (i >= count_ - 1) {
        i = count_ - 2;
    }
    const double t = pos - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[i] + h10 * step_ * derivatives_[i] + h01 * values_[i + 1] +
           h11 * step_ * derivatives_[i + 1];
}

double potential_pre(const ScenarioParameters& params, double delta) {
    const double delta_nl = no_load_equilibrium(params);
    const double k = params.internal_voltage /
                     (params.transient_reactance + params.line_reactance_post);
    return -k * (std::cos(delta) - std::cos(delta_nl)) -
           params.mechanical_power * (delta - delta_nl);
}

double energy_pre(const ScenarioParameters& params, const SwingState& state) {
    return 0.5 * params.inertia * state.omega * state.omega + potential_pre(params, state.delta);
}

double energy_post(const ScenarioParameters& params, const PostPotential& potential,
                   const SwingState& state) {
    return 0.5 * params.inertia * state.omega * state.omega + potential(state.delta);
}

namespace {

// Minimum of Phi_pre over the outward subset of an omega face. The outward
// condition at omega = w is sign * omega_dot > 0 with omega_dot evaluated on
// the no-load field. Candidates are the scanned samples plus the bisected
// zeros of omega_dot (the constrained minimum can sit on the condition
// boundary).
double omega_face_barrier(const ScenarioParameters& params, const Box& box, double w, int sign,
                          int scan_points) {
    auto accel = [&](double delta) {
        return params.mechanical_power - no_load_power(params, delta) - params.damping * w;
    };
    auto outward = [&](double delta) { return sign * accel(delta) > 0.0; };

    const int n = std::max(scan_points, 16);
    const double span = box.delta_hi - box.delta_lo;
    double best = kInf;
    double prev_delta = box.delta_lo;
    bool prev_out = outward(prev_delta);
    if (prev_out) {
        best = potential_pre(params, prev_delta);
    }
    for (int i = 1; i <= n; ++i) {
        const double delta = box.delta_lo + span * static_cast<double>(i) / n;
        const bool out = outward(delta);
        if (out) {
            best = std::min(best, potential_pre(params, delta));
        }
        if (out != prev_out) {
            const double cross = bisect(accel, prev_delta, delta);
            best = std::min(best, potential_pre(params, cross));
        }
        prev_delta = delta;
        prev_out = out;
    }
    if (!std::isfinite(best)) {
        return kInf; // empty outward set on this face
    }
    return 0.5 * params.inertia * w * w + best;
}

struct BoundarySample {
    double delta;
    double omega;
    int normal_delta; // outward normal direction, one nonzero component
    int normal_omega;
};

// Admissible delta-subintervals of [delta_lo, delta_hi]: where the post-topology
// load bus is feasible with voltage inside [v_min, v_max].
std::vector<std::pair<double, double>> admissible_delta_intervals(
    const ScenarioParameters& params, const Box& box, int scan_points) {
    auto band_margin = [&](double delta) {
        const LoadBusSolution bus = post_state_voltage(params, delta);
        if (!bus.feasible) {
            return -1.0;
        }
        return std::min(bus.v - params.v_min, params.v_max - bus.v);
    };
    const int n = std::max(scan_points, 64);
    const double span = box.delta_hi - box.delta_lo;
    std::vector<std::pair<double, double>> intervals;
    double prev = box.delta_lo;
    bool prev_in = band_margin(prev) >= 0.0;
    double open_at = prev_in ? prev : 0.0;
    for (int i = 1; i <= n; ++i) {
        const double delta = box.delta_lo + span * static_cast<double>(i) / n;
        const bool in = band_margin(delta) >= 0.0;
        if (in != prev_in) {
            const double cross = bisect(band_margin, prev, delta);
            if (in) {
                open_at = cross;
            } else {
                intervals.emplace_back(open_at, cross);
            }
        }
        prev = delta;
        prev_in = in;
    }
    if (prev_in) {
        intervals.emplace_back(open_at, box.delta_hi);
    }
    return intervals;
}

} // namespace

EnergyCertificate compute_certificate(const ScenarioParameters& params,
                                      const PostPotential& potential, int face_scan_points,
                                      int boundary_points) {
    EnergyCertificate cert;
    cert.delta_eq_noload = no_load_equilibrium(params);
    cert.delta_eq_load = potential.delta_eq();
    cert.face_scan_points = face_scan_points;
    cert.boundary_points = boundary_points;
    cert.box = Box{cert.delta_eq_load - params.delta_max, cert.delta_eq_load + params.delta_max,
                   -params.omega_max, params.omega_max};

    // Pre certificate: four face barriers, Eq.-style outward infima. The delta
    // faces attain their infimum at omega -> 0, giving the closed form directly.
    cert.face_delta_plus = potential_pre(params, cert.box.delta_hi);
    cert.face_delta_minus = potential_pre(params, cert.box.delta_lo);
    cert.face_omega_plus =
        omega_face_barrier(params, cert.box, params.omega_max, +1, face_scan_points);
    cert.face_omega_minus =
        omega_face_barrier(params, cert.box, -params.omega_max, -1, face_scan_points);

    cert.e_crit_pre = cert.face_delta_plus;
    cert.binding_face = Face::delta_plus;
    const std::pair<double, Face> faces[] = {
        {cert.face_delta_minus, Face::delta_minus},
        {cert.face_omega_plus, Face::omega_plus},
        {cert.face_omega_minus, Face::omega_minus},
    };
    for (const auto& [value, face] : faces) {
        if (value < cert.e_crit_pre) {
            cert.e_crit_pre = value;
            cert.binding_face = face;
        }
    }

    // Post certificate: dense sampling of the admissible boundary, keeping
    // outward points under the load-connected field.
    const int per_edge = std::max(boundary_points / 4, 16);
    std::vector<BoundarySample> samples;
    samples.reserve(static_cast<std::size_t>(per_edge) * 4);

    const auto intervals = admissible_delta_intervals(params, cert.box, per_edge);
    for (const auto& [a, b] : intervals) {
        for (int i = 0; i < per_edge; ++i) {
            const double delta = a + (b - a) * static_cast<double>(i) / (per_edge - 1);
            samples.push_back({delta, cert.box.omega_hi, 0, +1});
            samples.push_back({delta, cert.box.omega_lo, 0, -1});
        }
        // Vertical segments: box edges where admissible, else voltage-bound
        // arcs. Either way the outward normal points along -delta at the left
        // endpoint and +delta at the right one.
        for (int i = 0; i < per_edge; ++i) {
            const double omega = cert.box.omega_lo +
                                 (cert.box.omega_hi - cert.box.omega_lo) *
                                     static_cast<double>(i) / (per_edge - 1);
            samples.push_back({a, omega, -1, 0});
            samples.push_back({b, omega, +1, 0});
        }
    }

    cert.e_crit_post = kInf;
    for (const auto& s : samples) {
        // Outward test n . f_post > 0 with f_post = (omega, omega_dot).
        double flow;
        if (s.normal_delta != 0) {
            flow = s.normal_delta * s.omega;
        } else {
            double pe;
            try {
                pe = electrical_power_load(params, s.delta);
            } catch (const std::domain_error&) {
                continue;
            }
            const double accel =
                (params.mechanical_power - pe - params.damping * s.omega) / params.inertia;
            flow = s.normal_omega * accel;
        }
        if (flow <= 0.0) {
            continue;
        }
        const double value =
            energy_post(params, potential, SwingState{s.delta, s.omega, 0.0});
        if (value < cert.e_crit_post) {
            cert.e_crit_post = value;
            cert.binding_delta = s.delta;
            cert.binding_omega = s.omega;
        }
    }
    if (!std::isfinite(cert.e_crit_post)) {
        throw std::runtime_error("no outward boundary points found for the post certificate");
    }
    return cert;
}

EnergyCertificate compute_certificate(const ScenarioParameters& params, int face_scan_points,
                                      int boundary_points) {
    const LoadEquilibrium eq = load_connected_equilibrium(params);
    const PostPotential potential(params, eq.delta_eq);
    return compute_certificate(params, potential, face_scan_points, boundary_points);
}

} // namespace recert
