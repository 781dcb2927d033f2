#include "recert/cli_runner.hpp"

#include "recert/energy_certificates.hpp"
#include "recert/equilibria.hpp"
#include "recert/network_algebra.hpp"
#include "recert/safe_set.hpp"
#include "recert/scenario.hpp"
#include "recert/swing_dynamics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace recert {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;
constexpr double kPostWindow = 5.0; // seconds simulated past each sweep switch

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(double value) {
    std::ostringstream os;
    os << std::setprecision(12) << value;
    return os.str();
}

std::string face_name(Face face) {
    switch (face) {
    case Face::delta_plus: return "delta_plus";
    case Face::delta_minus: return "delta_minus";
    case Face::omega_plus: return "omega_plus";
    case Face::omega_minus: return "omega_minus";
    }
    return "unknown";
}

// Wall-clock laps per pipeline stage, reported in the manifest.
struct StageClock {
    using clock = std::chrono::steady_clock;
    clock::time_point mark = clock::now();
    std::vector<std::pair<std::string, double>> stages;

    void lap(const std::string& name) {
        const auto now = clock::now();
        stages.emplace_back(name, std::chrono::duration<double, std::milli>(now - mark).count());
        mark = now;
    }
};

// Accumulates output files for one command and writes the manifest last.
class ArtifactWriter {
public:
    ArtifactWriter(fs::path out_dir, const ScenarioParameters& params, std::string command_line)
        : out_dir_(std::move(out_dir)), command_line_(std::move(command_line)),
          scenario_(json::parse(scenario_to_json_text(params))) {
        std::error_code ec;
        fs::create_directories(out_dir_, ec);
        if (ec) {
            throw io_error("cannot create output directory " + out_dir_.string() + ": " +
                           ec.message());
        }
    }

    const json& scenario() const { return scenario_; }

    void write_json(const std::string& name, json doc) {
        doc["scenario"] = scenario_;
        write_text(name, doc.dump(2) + "\n");
    }

    // CSV files carry the scenario copy as a single commented first line.
    void write_csv(const std::string& name, const std::string& header,
                   const std::vector<std::string>& rows) {
        std::ostringstream os;
        os << "# scenario: " << scenario_.dump() << "\n" << header << "\n";
        for (const auto& row : rows) {
            os << row << "\n";
        }
        write_text(name, os.str());
    }

    void write_manifest(const StageClock& clock) {
        json timings = json::array();
        for (const auto& [stage, ms] : clock.stages) {
            timings.push_back({{"stage", stage}, {"ms", ms}});
        }
        json doc = {{"scenario", scenario_},
                    {"command", command_line_},
                    {"tool_version", kToolVersion},
                    {"outputs", outputs_},
                    {"timings_ms", timings}};
        outputs_.push_back("manifest.json");
        doc["outputs"] = outputs_;
        write_text("manifest.json", doc.dump(2) + "\n", /*track=*/false);
    }

private:
    void write_text(const std::string& name, const std::string& text, bool track = true) {
        const fs::path path = out_dir_ / name;
        std::ofstream out(path);
        if (!out) {
            throw io_error("cannot open " + path.string() + " for writing");
        }
        out << text;
        out.close();
        if (!out) {
            throw io_error("failed writing " + path.string());
        }
        if (track) {
            outputs_.push_back(name);
        }
    }

    fs::path out_dir_;
    std::string command_line_;
    json scenario_;
    std::vector<std::string> outputs_;
};

json equilibria_json(const EquilibriumSet& eq) {
    return {{"prefault",
             {{"delta_deg", eq.prefault.delta_ss * kDegPerRad},
              {"phi_deg", eq.prefault.phi_ss * kDegPerRad},
              {"v_pu", eq.prefault.v_ss},
              {"iterations", eq.prefault.iterations}}},
            {"no_load", {{"delta_deg", eq.delta_eq_noload * kDegPerRad}}},
            {"load_connected",
             {{"delta_deg", eq.load_connected.delta_eq * kDegPerRad},
              {"phi_deg", eq.load_connected.phi_eq * kDegPerRad},
              {"v_pu", eq.load_connected.v_eq}}}};
}

int cmd_equilibria(const ScenarioParameters& params, ArtifactWriter& writer, StageClock& clock,
                   const std::string& format) {
    const EquilibriumSet eq = solve_equilibria(params);
    clock.lap("equilibria");

    if (format == "csv") {
        std::vector<std::string> rows = {
            "prefault," + fmt(eq.prefault.delta_ss * kDegPerRad) + "," +
                fmt(eq.prefault.phi_ss * kDegPerRad) + "," + fmt(eq.prefault.v_ss),
            "no_load," + fmt(eq.delta_eq_noload * kDegPerRad) + ",,",
            "load_connected," + fmt(eq.load_connected.delta_eq * kDegPerRad) + "," +
                fmt(eq.load_connected.phi_eq * kDegPerRad) + "," + fmt(eq.load_connected.v_eq)};
        writer.write_csv("equilibria.csv", "point,delta_deg,phi_deg,v_pu", rows);
    } else {
        writer.write_json("equilibria.json", equilibria_json(eq));
    }
    clock.lap("write");
    writer.write_manifest(clock);
    return 0;
}

int cmd_certify(const ScenarioParameters& params, ArtifactWriter& writer, StageClock& clock,
                double dt, int grid_resolution) {
    const EquilibriumSet eq = solve_equilibria(params);
    clock.lap("equilibria");

    const PostPotential potential(params, eq.load_connected.delta_eq);
    clock.lap("post_potential");

    const EnergyCertificate cert = compute_certificate(params, potential);
    clock.lap("certificate");

    const SafeSetGrid grid = classify_grid(params, cert, potential, grid_resolution);
    clock.lap("grid");

    const ReconnectionDecision decision = earliest_reconnection(params, cert, potential, dt);
    clock.lap("decision");

    writer.write_json(
        "certificate.json",
        {{"e_crit_pre", cert.e_crit_pre},
         {"binding_face", face_name(cert.binding_face)},
         {"faces",
          {{"delta_plus", cert.face_delta_plus},
           {"delta_minus", cert.face_delta_minus},
           {"omega_plus", cert.face_omega_plus},
           {"omega_minus", cert.face_omega_minus}}},
         {"e_crit_post", cert.e_crit_post},
         {"post_binding",
          {{"delta_deg", cert.binding_delta * kDegPerRad}, {"omega_rad_s", cert.binding_omega}}},
         {"box",
          {{"delta_lo_deg", cert.box.delta_lo * kDegPerRad},
           {"delta_hi_deg", cert.box.delta_hi * kDegPerRad},
           {"omega_lo_rad_s", cert.box.omega_lo},
           {"omega_hi_rad_s", cert.box.omega_hi}}},
         {"delta_eq_noload_deg", cert.delta_eq_noload * kDegPerRad},
         {"delta_eq_load_deg", cert.delta_eq_load * kDegPerRad},
         {"face_scan_points", cert.face_scan_points},
         {"boundary_points", cert.boundary_points}});

    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(grid.resolution) * grid.resolution);
    for (int i = 0; i < grid.resolution; ++i) {
        for (int j = 0; j < grid.resolution; ++j) {
            const auto idx = static_cast<std::size_t>(i) * grid.resolution + j;
            rows.push_back(fmt(grid.delta_axis[i] * kDegPerRad) + "," + fmt(grid.omega_axis[j]) +
                           "," + std::to_string(grid.in_pre[idx]) + "," +
                           std::to_string(grid.in_post[idx]) + "," +
                           std::to_string(grid.in_adm[idx]) + "," +
                           std::to_string(grid.in_safe[idx]));
        }
    }
    writer.write_csv("grid.csv", "delta_deg,omega_rad_s,in_pre,in_post,in_adm,in_safe", rows);

    json decision_doc = {{"dt", dt},
                         {"grid_resolution", grid.resolution},
                         {"safe_fraction", grid.safe_fraction},
                         {"entered_safe", decision.entered_safe}};
    if (decision.entered_safe) {
        std::size_t violations = 0;
        json first_violation = nullptr;
        for (const auto& sample : decision.audit) {
            if (!sample.in_safe) {
                ++violations;
                if (first_violation.is_null()) {
                    first_violation = sample.time;
                }
            }
        }
        decision_doc["t_star"] = decision.t_star;
        decision_doc["switch"] = {{"t", decision.switch_state.time},
                                  {"delta_deg", decision.switch_state.delta * kDegPerRad},
                                  {"omega_rad_s", decision.omega_at_switch}};
        decision_doc["audit"] = {{"window_s", 5.0},
                                 {"samples", decision.audit.size()},
                                 {"violations", violations},
                                 {"first_violation_t", first_violation}};
    } else {
        decision_doc["t_star"] = nullptr;
        decision_doc["switch"] = nullptr;
        decision_doc["audit"] = nullptr;
    }
    writer.write_json("decision.json", decision_doc);
    clock.lap("write");
    writer.write_manifest(clock);

    if (!decision.entered_safe) {
        std::cerr << "certification negative: no safe reconnection time within the horizon\n";
        return 1;
    }
    return 0;
}

// Appends trajectory rows; stages after the first skip their leading sample,
// which duplicates the previous stage's final state.
void append_rows(std::vector<std::string>& rows, const Trajectory& traj, const char* mode_label,
                 bool skip_first, const ScenarioParameters& params,
                 const PostPotential& potential) {
    const std::size_t begin = skip_first && !traj.samples.empty() ? 1 : 0;
    for (std::size_t k = begin; k < traj.samples.size(); ++k) {
        const SwingState& s = traj.samples[k];
        std::string v_field;
        std::string phi_field;
        if (traj.mode == Mode::reconnected) {
            const LoadBusSolution bus = post_state_voltage(params, s.delta);
            if (bus.feasible) {
                v_field = fmt(bus.v);
                phi_field = fmt(bus.phi * kDegPerRad);
            }
        }
        std::string e_post_field;
        try {
            e_post_field = fmt(energy_post(params, potential, s));
        } catch (const std::domain_error&) {
            // outside the cached potential range; leave the cell empty
        }
        rows.push_back(fmt(s.time) + "," + mode_label + "," + fmt(s.delta * kDegPerRad) + "," +
                       fmt(s.omega) + "," + v_field + "," + phi_field + "," +
                       fmt(energy_pre(params, s)) + "," + e_post_field);
    }
}

struct RunStats {
    double min_omega = 0.0;
    double max_delta_dev_deg = 0.0;
};

// Post-switch excursion statistics over the reconnected stage.
RunStats post_stats(const ReconnectionRun& run, double delta_eq_load) {
    RunStats stats;
    stats.min_omega = std::numeric_limits<double>::infinity();
    for (const SwingState& s : run.post.samples) {
        stats.min_omega = std::min(stats.min_omega, s.omega);
        stats.max_delta_dev_deg =
            std::max(stats.max_delta_dev_deg, std::abs(s.delta - delta_eq_load) * kDegPerRad);
    }
    if (run.post.samples.empty()) {
        stats.min_omega = 0.0;
    }
    return stats;
}

int cmd_simulate(const ScenarioParameters& params, ArtifactWriter& writer, StageClock& clock,
                 double dt, double reconnect_at, double t_end) {
    const EquilibriumSet eq = solve_equilibria(params);
    const PostPotential potential(params, eq.load_connected.delta_eq);
    clock.lap("setup");

    const ReconnectionRun run = simulate_reconnection(params, reconnect_at, t_end, dt);
    clock.lap("simulate");

    std::vector<std::string> rows;
    rows.reserve(run.fault_on.samples.size() + run.waiting.samples.size() +
                 run.post.samples.size());
    append_rows(rows, run.fault_on, "fault", false, params, potential);
    append_rows(rows, run.waiting, "waiting", true, params, potential);
    append_rows(rows, run.post, "reconnected", true, params, potential);
    writer.write_csv("trajectory.csv", "t,mode,delta_deg,omega_rad_s,v_pu,phi_deg,e_pre,e_post",
                     rows);

    const RunStats stats = post_stats(run, eq.load_connected.delta_eq);
    const SwingState& final_state =
        run.post.samples.empty()
            ? (run.waiting.samples.empty() ? run.fault_on.samples.back()
                                           : run.waiting.samples.back())
            : run.post.samples.back();
    json first_violation = nullptr;
    if (!run.post.violations.empty()) {
        first_violation = {{"t", run.post.violations.front().time},
                           {"limit", run.post.violations.front().limit}};
    }
    writer.write_json("simulation.json",
                      {{"reconnect_at", reconnect_at},
                       {"t_end", t_end},
                       {"dt", dt},
                       {"verdict", run.flapped ? "flapped" : "safe"},
                       {"flapped", run.flapped},
                       {"min_omega_rad_s", stats.min_omega},
                       {"max_delta_dev_deg", stats.max_delta_dev_deg},
                       {"post_violations", run.post.violations.size()},
                       {"first_violation", first_violation},
                       {"final",
                        {{"t", final_state.time},
                         {"delta_deg", final_state.delta * kDegPerRad},
                         {"omega_rad_s", final_state.omega}}}});
    clock.lap("write");
    writer.write_manifest(clock);
    return 0;
}

int cmd_sweep(const ScenarioParameters& params, ArtifactWriter& writer, StageClock& clock,
              double dt, double from, double to, double step) {
    const EquilibriumSet eq = solve_equilibria(params);
    clock.lap("setup");

    std::vector<double> times;
    for (std::size_t k = 0;; ++k) {
        const double t = from + static_cast<double>(k) * step;
        if (t > to + 1e-9) {
            break;
        }
        times.push_back(t);
    }

    struct Row {
        double t = 0.0;
        bool flapped = false;
        double min_omega = 0.0;
        double max_dev_deg = 0.0;
    };
    std::vector<Row> results(times.size());

    auto classify_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t idx = begin; idx < end; ++idx) {
            const double t = times[idx];
            const ReconnectionRun run =
                simulate_reconnection(params, t, t + kPostWindow, dt);
            const RunStats stats = post_stats(run, eq.load_connected.delta_eq);
            results[idx] = {t, run.flapped, stats.min_omega, stats.max_delta_dev_deg};
        }
    };
    const std::size_t workers = std::min<std::size_t>(
        std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(times.size(), 1));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = times.size() * w / workers;
        const std::size_t end = times.size() * (w + 1) / workers;
        pool.emplace_back(classify_range, begin, end);
    }
    for (auto& t : pool) {
        t.join();
    }
    clock.lap("sweep");

    // results is already ordered by construction; keep the sort explicit so the
    // output contract does not depend on the scheduling above.
    std::sort(results.begin(), results.end(),
              [](const Row& a, const Row& b) { return a.t < b.t; });
    std::vector<std::string> rows;
    rows.reserve(results.size());
    for (const Row& r : results) {
        rows.push_back(fmt(r.t) + "," + (r.flapped ? "flapped" : "safe") + "," +
                       fmt(r.min_omega) + "," + fmt(r.max_dev_deg));
    }
    writer.write_csv("sweep.csv", "t_reconnect,verdict,min_omega_rad_s,max_delta_dev_deg", rows);
    clock.lap("write");
    writer.write_manifest(clock);
    return 0;
}

std::string join_arguments(int argc, char** argv) {
    std::string line;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) {
            line += ' ';
        }
        line += argv[i];
    }
    return line;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Energy-certificate reconnection tool for a constant-power load "
                 "on a single-machine system"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format = "json";
    double dt = 0.001;
    int grid_resolution = 140;
    double reconnect_at = 0.0;
    double t_end = -1.0;
    double sweep_from = 0.0;
    double sweep_to = 1.0;
    double sweep_step = 0.001;

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scenario JSON file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--dt", dt, "integration step, s")->capture_default_str();
        sub->add_option("--grid", grid_resolution, "safe-set grid resolution")
            ->capture_default_str();
        sub->add_option("--format", format, "output format for tabular artifacts")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };

    CLI::App* equilibria_cmd =
        app.add_subcommand("equilibria", "solve and report the three operating points");
    add_shared(equilibria_cmd);

    CLI::App* certify_cmd = app.add_subcommand(
        "certify", "full pipeline: certificate, safe-set grid, reconnection decision");
    add_shared(certify_cmd);

    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "simulate a reconnection at a chosen time");
    add_shared(simulate_cmd);
    simulate_cmd->add_option("--reconnect-at", reconnect_at, "switch time after clearing, s")
        ->required();
    simulate_cmd->add_option("--t-end", t_end,
                             "end of the simulation, s (default: reconnect time + 5)");

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "classify reconnection times over a range by simulation");
    add_shared(sweep_cmd);
    sweep_cmd->add_option("--from", sweep_from, "first reconnection time, s")
        ->capture_default_str();
    sweep_cmd->add_option("--to", sweep_to, "last reconnection time, s")->capture_default_str();
    sweep_cmd->add_option("--step", sweep_step, "sweep step, s")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const ScenarioParameters params = load_scenario(config_path);
        if (dt <= 0.0) {
            std::cerr << "usage error: --dt must be positive\n";
            return 2;
        }
        if (grid_resolution < 1) {
            std::cerr << "usage error: --grid must be at least 1\n";
            return 2;
        }
        const double resolved_end = t_end < 0.0 ? reconnect_at + 5.0 : t_end;
        if (*simulate_cmd) {
            if (reconnect_at < 0.0) {
                std::cerr << "usage error: --reconnect-at must be nonnegative\n";
                return 2;
            }
            if (resolved_end < reconnect_at) {
                std::cerr << "usage error: --t-end must not precede --reconnect-at\n";
                return 2;
            }
        }
        if (*sweep_cmd) {
            if (sweep_step <= 0.0) {
                std::cerr << "usage error: --step must be positive\n";
                return 2;
            }
            if (sweep_from > sweep_to) {
                std::cerr << "usage error: empty sweep range (--from exceeds --to)\n";
                return 2;
            }
        }

        StageClock clock;
        ArtifactWriter writer(out_dir, params, join_arguments(argc, argv));
        clock.lap("load");

        if (*equilibria_cmd) {
            return cmd_equilibria(params, writer, clock, format);
        }
        if (*certify_cmd) {
            return cmd_certify(params, writer, clock, dt, grid_resolution);
        }
        if (*simulate_cmd) {
            return cmd_simulate(params, writer, clock, dt, reconnect_at, resolved_end);
        }
        if (*sweep_cmd) {
            return cmd_sweep(params, writer, clock, dt, sweep_from, sweep_to, sweep_step);
        }
        return 2;
    } catch (const io_error& ex) {
        std::cerr << "environment error: " << ex.what() << "\n";
        return 3;
    } catch (const scenario_error& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return 2;
    } catch (const equilibrium_error& ex) {
        std::cerr << "solver error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
}

} // namespace recert
