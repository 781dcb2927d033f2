#include <catch2/catch_amalgamated.hpp>

#include "recert/energy_certificates.hpp"
#include "recert/equilibria.hpp"
#include "recert/safe_set.hpp"
#include "recert/scenario.hpp"

#include <cmath>
#include <numbers>

using Catch::Approx;
using namespace recert;

namespace {
const ScenarioParameters params = load_scenario(RECERT_TABLE1_JSON);
constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double delta_nl = 0.655459784;
constexpr double delta_eq = 0.380126141;
const SwingState golden_switch{0.555796756980, -1.387260180414, 0.488};

const PostPotential& golden_potential() {
    static const PostPotential potential(params, load_connected_equilibrium(params).delta_eq);
    return potential;
}

const EnergyCertificate& golden_certificate() {
    static const EnergyCertificate cert = compute_certificate(params, golden_potential());
    return cert;
}
} // namespace

TEST_CASE("admissibility enforces the box and the voltage band", "[safe_set]") {
    CHECK(admissible(params, delta_eq, {delta_eq, 0.0, 0.0}));
    CHECK(admissible(params, delta_eq, {delta_eq + 29.0 * kDeg, 1.9, 0.0}));
    CHECK_FALSE(admissible(params, delta_eq, {delta_eq + 31.0 * kDeg, 0.0, 0.0}));
    CHECK_FALSE(admissible(params, delta_eq, {delta_eq, 2.1, 0.0}));

    // Narrow the voltage band until the connected equilibrium voltage violates it.
    ScenarioParameters narrow = params;
    narrow.v_max = 1.0; // v at delta_eq is about 1.046
    CHECK_FALSE(admissible(narrow, delta_eq, {delta_eq, 0.0, 0.0}));
}

TEST_CASE("safe-set membership at the key states", "[safe_set]") {
    const EnergyCertificate& cert = golden_certificate();
    const PostPotential& phi = golden_potential();

    // The connected equilibrium itself is outside the certified set: its no-load
    // potential (about 0.0419) already exceeds e_crit_pre, so parking there
    // cannot be certified against a later disconnection.
    CHECK_FALSE(in_safe_set(params, cert, phi, {delta_eq, 0.0, 0.0}));
    CHECK(energy_pre(params, {delta_eq, 0.0, 0.0}) > cert.e_crit_pre);
    CHECK(in_safe_set(params, cert, phi, golden_switch));
    // The freshly cleared state is energetic far beyond both certificates.
    CHECK_FALSE(in_safe_set(params, cert, phi, {0.573949049498, 4.081443020637, 0.0}));
    // The no-load equilibrium fails the post-energy test.
    CHECK_FALSE(in_safe_set(params, cert, phi, {delta_nl, 0.0, 0.0}));
    CHECK(energy_post(params, phi, {delta_nl, 0.0, 0.0}) > cert.e_crit_post);
}

TEST_CASE("grid fractions at the reference resolutions", "[safe_set]") {
    const SafeSetGrid grid = classify_grid(params, golden_certificate(), golden_potential(), 140);
    CHECK(grid.resolution == 140);
    REQUIRE(grid.in_safe.size() == 140u * 140u);
    CHECK(grid.safe_fraction == Approx(0.10694).margin(0.005));

    const SafeSetGrid fine = classify_grid(params, golden_certificate(), golden_potential(), 280);
    CHECK(fine.safe_fraction == Approx(grid.safe_fraction).margin(0.01));
}

TEST_CASE("grid masks are mutually consistent", "[safe_set]") {
    const SafeSetGrid grid = classify_grid(params, golden_certificate(), golden_potential(), 70);
    for (std::size_t idx = 0; idx < grid.in_safe.size(); ++idx) {
        const bool expected = grid.in_pre[idx] && grid.in_post[idx] && grid.in_adm[idx];
        REQUIRE(static_cast<bool>(grid.in_safe[idx]) == expected);
    }
    // The golden scenario keeps the whole box inside the voltage band.
    for (const auto adm : grid.in_adm) {
        REQUIRE(adm == 1);
    }
}

TEST_CASE("grid axes are cell centers and classify the central cell", "[safe_set]") {
    const SafeSetGrid grid = classify_grid(params, golden_certificate(), golden_potential(), 279);
    const std::size_t mid = 139;
    CHECK(grid.delta_axis[mid] == Approx(delta_eq).margin(1e-8));
    CHECK(grid.omega_axis[mid] == Approx(0.0).margin(1e-12));
    // The center cell sits on the connected equilibrium: admissible and inside
    // the post certificate, but its pre energy exceeds e_crit_pre (see the
    // membership test above), so it is not counted safe.
    CHECK(grid.in_adm[mid * 279 + mid] == 1);
    CHECK(grid.in_post[mid * 279 + mid] == 1);
    CHECK(grid.in_pre[mid * 279 + mid] == 0);
    CHECK(grid.in_safe[mid * 279 + mid] == 0);
    CHECK(grid.delta_axis.front() > golden_certificate().box.delta_lo);
    CHECK(grid.delta_axis.back() < golden_certificate().box.delta_hi);
}

TEST_CASE("a void post certificate empties the safe set", "[safe_set]") {
    EnergyCertificate cert = golden_certificate();
    cert.e_crit_post = 0.0;
    const SafeSetGrid grid = classify_grid(params, cert, golden_potential(), 70);
    CHECK(grid.safe_fraction == 0.0);
}

TEST_CASE("earliest reconnection on the golden scenario", "[safe_set]") {
    const ReconnectionDecision decision =
        earliest_reconnection(params, golden_certificate(), golden_potential(), 1e-3);
    REQUIRE(decision.entered_safe);
    CHECK(decision.t_star == Approx(0.488).margin(1e-9));
    CHECK(decision.switch_state.delta == Approx(golden_switch.delta).margin(1e-9));
    CHECK(decision.switch_state.omega == Approx(golden_switch.omega).margin(1e-9));
    CHECK(decision.omega_at_switch == decision.switch_state.omega);

    // Audit covers [t_star, t_star + 5 s] at the integration step.
    REQUIRE(decision.audit.size() == 5001);
    CHECK(decision.audit.front().time == decision.t_star);
    CHECK(decision.audit.front().in_safe);
    std::size_t violations = 0;
    double first_violation = -1.0;
    for (const AuditSample& sample : decision.audit) {
        if (!sample.in_safe) {
            ++violations;
            if (first_violation < 0.0) {
                first_violation = sample.time;
            }
        }
    }
    // Certification is not monotone in time: had the switch been postponed,
    // the waiting orbit would leave the certified set at 0.731 s (settling
    // toward the no-load equilibrium raises the load-connected energy past
    // e_crit_post), reopen briefly over [1.301, 1.404) s on the back-swing,
    // and stay out for the rest of the window.
    CHECK(violations == 4655);
    CHECK(first_violation == Approx(0.731).margin(1e-9));
}

TEST_CASE("no safe instant within a short horizon", "[safe_set]") {
    const ReconnectionDecision decision =
        earliest_reconnection(params, golden_certificate(), golden_potential(), 1e-3, 0.1);
    CHECK_FALSE(decision.entered_safe);
    CHECK(std::isnan(decision.t_star));
    CHECK(decision.audit.empty());
}

TEST_CASE("start overrides feed arbitrary initial states", "[safe_set]") {
    // From the no-load equilibrium the waiting dynamics never move, and that
    // state fails the post-energy test, so certification stays negative.
    const ReconnectionDecision parked = earliest_reconnection(
        params, golden_certificate(), golden_potential(), 1e-3, 2.0,
        SwingState{delta_nl, 0.0, 0.0});
    CHECK_FALSE(parked.entered_safe);

    // A state already inside the safe set certifies immediately.
    SwingState inside = golden_switch;
    inside.time = 7.7;
    const ReconnectionDecision immediate = earliest_reconnection(
        params, golden_certificate(), golden_potential(), 1e-3, 2.0, inside);
    REQUIRE(immediate.entered_safe);
    CHECK(immediate.t_star == 7.7);
    CHECK(immediate.switch_state.delta == inside.delta);
    // The audit window extends past the 2 s search horizon when needed.
    REQUIRE(immediate.audit.size() == 5001);
    CHECK(immediate.audit.front().time == 7.7);
    CHECK(immediate.audit.back().time == Approx(12.7).margin(1e-9));
}

TEST_CASE("simulated reconnection at the certified time settles", "[safe_set]") {
    const ReconnectionRun run = simulate_reconnection(params, 0.487, 0.487 + 5.0, 1e-3);
    CHECK_FALSE(run.flapped);
    CHECK(run.post.violations.empty());
    const SwingState final_state = run.post.samples.back();
    CHECK(final_state.delta == Approx(delta_eq).margin(1e-2));
    CHECK(std::abs(final_state.omega) < 0.05);
}

TEST_CASE("simulated early reconnection flaps with a deep frequency dip", "[safe_set]") {
    const ReconnectionRun run = simulate_reconnection(params, 0.300, 0.300 + 5.0, 1e-3);
    CHECK(run.flapped);
    REQUIRE_FALSE(run.post.violations.empty());
    double min_omega = 0.0;
    for (const SwingState& s : run.post.samples) {
        min_omega = std::min(min_omega, s.omega);
    }
    CHECK(min_omega == Approx(-3.88199).margin(5e-3));
}

TEST_CASE("stage boundaries are continuous and anchored at the clearing instant", "[safe_set]") {
    const ReconnectionRun run = simulate_reconnection(params, 0.25, 1.0, 1e-3);
    REQUIRE_FALSE(run.fault_on.samples.empty());
    CHECK(run.fault_on.samples.front().time == Approx(-0.098).margin(1e-15));
    CHECK(run.fault_on.samples.back().time == 0.0);

    const SwingState& cleared = run.fault_on.samples.back();
    const SwingState& wait_first = run.waiting.samples.front();
    CHECK(wait_first.delta == cleared.delta);
    CHECK(wait_first.omega == cleared.omega);

    const SwingState& wait_last = run.waiting.samples.back();
    const SwingState& post_first = run.post.samples.front();
    CHECK(post_first.delta == wait_last.delta);
    CHECK(post_first.omega == wait_last.omega);
    CHECK(post_first.time == wait_last.time);
}

TEST_CASE("grid classification agrees with direct membership tests", "[safe_set]") {
    const SafeSetGrid grid = classify_grid(params, golden_certificate(), golden_potential(), 35);
    for (std::size_t i = 0; i < 35; i += 5) {
        for (std::size_t j = 0; j < 35; j += 5) {
            const SwingState s{grid.delta_axis[i], grid.omega_axis[j], 0.0};
            const bool direct =
                in_safe_set(params, golden_certificate(), golden_potential(), s);
            REQUIRE(static_cast<bool>(grid.in_safe[i * 35 + j]) == direct);
        }
    }
}
