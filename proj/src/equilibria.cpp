#include "recert/equilibria.hpp"

#include "recert/network_algebra.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace recert {
namespace {

constexpr double kFixedPointTol = 1e-10;
constexpr int kFixedPointCap = 1000;
constexpr double kRootTol = 1e-9;
constexpr int kBracketSubdivisions = 200;

// Bracket scan + bisection + secant polish for a continuous g on [lo, hi].
double find_root(const std::function<double(double)>& g, double lo, double hi,
                 const char* label) {
    double a = lo;
    double fa = g(a);
    double b = a;
    double fb = fa;
    bool bracketed = false;
    const double step = (hi - lo) / kBracketSubdivisions;
    for (int i = 1; i <= kBracketSubdivisions; ++i) {
        b = lo + i * step;
        fb = g(b);
        if (fa == 0.0 || fa * fb < 0.0) {
            bracketed = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!bracketed) {
        throw equilibrium_error(std::string("no sign change found for ") + label);
    }
    for (int i = 0; i < 80 && (b - a) > 1e-13; ++i) {
        const double mid = 0.5 * (a + b);
        const double fm = g(mid);
        if (fa * fm <= 0.0) {
            b = mid;
            fb = fm;
        } else {
            a = mid;
            fa = fm;
        }
    }
    double x0 = a, f0 = fa, x1 = b, f1 = fb;
    for (int i = 0; i < 8 && std::abs(f1) > 0.0 && x0 != x1; ++i) {
        if (f1 == f0) {
            break;
        }
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = g(x1);
    }
    const double root = std::abs(f1) <= std::abs(f0) ? x1 : x0;
    if (std::abs(g(root)) > kRootTol) {
        throw equilibrium_error(std::string("root polish failed for ") + label);
    }
    return root;
}

} // namespace

PrefaultEquilibrium solve_prefault(const ScenarioParameters& params) {
    const double e = params.internal_voltage;
    const double xd = params.transient_reactance;
    const double xl = params.line_reactance_pre;
    const double pg = params.mechanical_power;
    const double pdc = params.load_active;
    const double qdc = params.load_reactive;

    double v = 1.0; // flat start
    int iterations = 0;
    for (; iterations < kFixedPointCap; ++iterations) {
        const double gen_arg = e * e - pg * pg * xd * xd / (v * v);
        const double line_arg = 1.0 - (pg - pdc) * (pg - pdc) * xl * xl / (v * v);
        if (gen_arg < 0.0 || line_arg < 0.0) {
            throw equilibrium_error("pre-fault fixed point: negative square-root argument "
                                    "(infeasible loading)");
        }
        const double next = xl / (xd + xl) * std::sqrt(gen_arg) +
                            xd / (xd + xl) * std::sqrt(line_arg) -
                            xd * xl / (xd + xl) * qdc / v;
        const double change = std::abs(next - v);
        v = next;
        if (change < kFixedPointTol) {
            break;
        }
    }
    if (iterations >= kFixedPointCap) {
        throw equilibrium_error("pre-fault fixed point did not converge");
    }

    PrefaultEquilibrium eq;
    eq.v_ss = v;
    eq.iterations = iterations + 1;
    // Principal branches: delta_ss - phi_ss and phi_ss both in [-pi/2, pi/2].
    const double sin_phi = (pg - pdc) * xl / v;
    const double sin_rel = pg * xd / (e * v);
    if (std::abs(sin_phi) > 1.0 || std::abs(sin_rel) > 1.0) {
        throw equilibrium_error("pre-fault angle recovery: arcsin argument out of range");
    }
    eq.phi_ss = std::asin(sin_phi);
    eq.delta_ss = eq.phi_ss + std::asin(sin_rel);
    return eq;
}

double no_load_equilibrium(const ScenarioParameters& params) {
    const double arg = params.mechanical_power *
                       (params.transient_reactance + params.line_reactance_post) /
                       params.internal_voltage;
    if (arg > 1.0) {
        throw equilibrium_error("no-load equilibrium does not exist: p_g exceeds the "
                                "transfer limit of the post-clearing line");
    }
    return std::asin(arg);
}

LoadEquilibrium load_connected_equilibrium(const ScenarioParameters& params) {
    const double lo = 0.02;
    const double hi = std::numbers::pi / 2.0 - 0.02;
    const double root = find_root(
        [&](double delta) { return electrical_power_load(params, delta) - params.mechanical_power; },
        lo, hi, "load-connected equilibrium");

    const LoadBusSolution bus = post_state_voltage(params, root);
    if (!bus.feasible) {
        throw equilibrium_error("load bus infeasible at the load-connected equilibrium");
    }
    LoadEquilibrium eq;
    eq.delta_eq = root;
    eq.phi_eq = bus.phi;
    eq.v_eq = bus.v;
    return eq;
}

EquilibriumSet solve_equilibria(const ScenarioParameters& params) {
    EquilibriumSet set;
    set.prefault = solve_prefault(params);
    set.delta_eq_noload = no_load_equilibrium(params);
    set.load_connected = load_connected_equilibrium(params);
    return set;
}

} // namespace recert
