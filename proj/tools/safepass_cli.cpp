// safepass: scenario-driven simulation, gain calibration, trajectory
// verification and baseline comparison.
//
// Exit codes: 0 success/pass, 1 check failure, 2 input error.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "safepass/constraints.hpp"
#include "safepass/scenario.hpp"
#include "safepass/simulate.hpp"
#include "safepass/trajectory_io.hpp"
#include "safepass/verify.hpp"

namespace {

using namespace safepass;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInputError = 2;

struct RunOverrides {
    std::string scenario_path;
    std::string out_path;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    bool zoh = false;
};

void add_run_flags(CLI::App* cmd, RunOverrides& o, bool with_out) {
    cmd->add_option("--scenario", o.scenario_path, "Scenario JSON file")->required();
    if (with_out) cmd->add_option("--out", o.out_path, "Trajectory CSV output path");
    cmd->add_option("--dt", o.dt, "Override the integration step (s)");
    cmd->add_option("--seed", o.seed, "Override the scenario seed");
    cmd->add_flag("--zoh", o.zoh, "Hold the control constant over each step");
}

ScenarioFile load_with_overrides(const RunOverrides& o) {
    ScenarioFile file = load_scenario(o.scenario_path);
    Scenario& scn = file.scenario;
    if (o.dt) {
        if (!(*o.dt > 0.0) || *o.dt > scn.duration) {
            throw ScenarioError("--dt", "must be positive and not exceed the duration");
        }
        scn.dt = *o.dt;
    }
    if (o.seed) scn.seed = *o.seed;
    if (o.zoh) scn.zero_order_hold = true;
    return file;
}

std::string real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

void print_summary(const std::string& label, const TrajectorySummary& s, std::size_t records) {
    std::cout << "[" << label << "]\n"
              << "records=" << records << '\n'
              << "min_h=" << real(s.min_h) << '\n'
              << "min_c=" << real(s.min_c) << '\n'
              << "max_v_sq=" << real(s.max_v_sq) << '\n'
              << "fraction_in_C_eps=" << real(s.fraction_in_c_eps) << '\n'
              << "peak_u_norm=" << real(s.peak_u_norm) << '\n'
              << "baseline_infeasible=" << s.baseline_infeasible_count << '\n';
}

// Time intervals where h < 0, as "[a, b]" pairs.
void print_violation_intervals(const Trajectory& traj) {
    std::cout << "h_negative_intervals=";
    bool open = false;
    bool first = true;
    double start = 0.0;
    for (const auto& r : traj.records) {
        if (r.h < 0.0 && !open) {
            open = true;
            start = r.t;
        } else if (r.h >= 0.0 && open) {
            open = false;
            std::cout << (first ? "" : ";") << "[" << real(start) << "," << real(r.t) << "]";
            first = false;
        }
    }
    if (open) std::cout << (first ? "" : ";") << "[" << real(start) << "," << real(traj.records.back().t) << "]";
    std::cout << '\n';
}

int cmd_simulate(const RunOverrides& o) {
    const ScenarioFile file = load_with_overrides(o);
    const std::string out = !o.out_path.empty() ? o.out_path : file.output_csv.value_or("");
    if (out.empty()) throw ScenarioError("--out", "no output path given and scenario has none");
    const Trajectory traj = simulate(file.scenario);
    write_csv_file(traj, out);
    std::cout << "scenario=" << file.scenario.name << '\n' << "csv=" << out << '\n';
    print_summary("summary", traj.summary(), traj.records.size());
    print_violation_intervals(traj);
    return kExitOk;
}

int cmd_calibrate(const RunOverrides& o) {
    const ScenarioFile file = load_with_overrides(o);
    const Scenario& scn = file.scenario;
    const GainCalibration cal =
        calibrate_gain(scn.constraint, *scn.model, scn.barrier.k_h, scn.barrier.v_bar,
                       file.calibration.sampler(scn.seed));
    std::cout << "scenario=" << scn.name << '\n'
              << "samples=" << file.calibration.samples << '\n'
              << "mu1=" << real(cal.mu1) << '\n'
              << "cbar=" << real(cal.cbar) << '\n'
              << "v_bar=" << real(cal.v_bar) << '\n'
              << "kh_max=" << real(cal.kh_max) << '\n'
              << "kh=" << real(cal.kh) << '\n'
              << "admissible=" << (cal.admissible() ? "true" : "false") << '\n';
    const GradientSurvey grad =
        survey_grad_c_outside(scn.constraint, *scn.model, file.calibration.sampler(scn.seed));
    std::cout << "samples_outside_Q=" << grad.outside << '\n';
    if (grad.outside > 0) {
        std::cout << "min_grad_c_outside_Q=" << real(grad.min_norm) << '\n' << "min_grad_c_at_q=";
        for (Eigen::Index j = 0; j < grad.argmin.size(); ++j) std::cout << (j ? "," : "") << real(grad.argmin(j));
        std::cout << '\n';
    }
    return cal.admissible() ? kExitOk : kExitCheckFailed;
}

struct VerifyArgs {
    std::string traj_path;
    std::string scenario_path;
    std::optional<double> v_bar;
    std::optional<double> tol_invariance;
    std::optional<double> tol_velocity;
    std::optional<double> tol_passivity;
    std::optional<double> tol_return;
    std::optional<double> return_window;
    std::optional<double> rest_speed;
};

int cmd_verify(const VerifyArgs& a) {
    TrajectoryCheckOptions opts;
    if (!a.scenario_path.empty()) opts = load_scenario(a.scenario_path).tolerances;
    if (a.v_bar) opts.v_bar = *a.v_bar;
    if (a.tol_invariance) opts.invariance_tol = *a.tol_invariance;
    if (a.tol_velocity) opts.velocity_tol = *a.tol_velocity;
    if (a.tol_passivity) opts.passivity_tol = *a.tol_passivity;
    if (a.tol_return) opts.return_tol = *a.tol_return;
    if (a.return_window) opts.return_window = *a.return_window;
    if (a.rest_speed) opts.rest_speed = *a.rest_speed;

    const Trajectory traj = read_csv_file(a.traj_path);
    const auto reports = run_trajectory_checks(traj, opts);
    std::cout << format_reports(reports);
    const bool failed = any_failed(reports);
    std::cout << "verdict=" << (failed ? "FAIL" : "pass") << '\n';
    return failed ? kExitCheckFailed : kExitOk;
}

void print_comparison_row(const std::string& label, const TrajectorySummary& s) {
    char line[200];
    std::snprintf(line, sizeof line, "%-10s %12.5g %12.5g %12.5g %12.5g %12zu %10.4f\n",
                  label.c_str(), s.min_h, s.min_c, s.max_v_sq, s.peak_u_norm,
                  s.baseline_infeasible_count, s.fraction_in_c_eps);
    std::cout << line;
}

// Closed-form baseline at a fixed configuration while |v| shrinks.
void print_shrinking_speed_sweep(const Scenario& scn, const Trajectory& proposed) {
    std::size_t idx = 0;
    for (std::size_t k = 1; k < proposed.records.size(); ++k) {
        if (proposed.records[k].c < proposed.records[idx].c) idx = k;
    }
    const SimRecord& at = proposed.records[idx];
    std::cout << "\nshrinking-speed sweep at t=" << real(at.t) << " (c=" << real(at.c) << ")\n";
    if (at.c >= 0.0) {
        std::cout << "skipped: configuration never leaves Q, so h >= 0 as |v| -> 0\n";
        return;
    }
    const int n = scn.model->dof();
    Vector dir = at.v.norm() > 0.0 ? Vector(at.v.normalized()) : Vector(Vector::Unit(n, 0));
    std::printf("%12s %12s %14s %16s %10s\n", "|v|", "h", "|u_baseline|", "|u - u_nom|", "growth");
    double previous = 0.0;
    for (double speed : {1e-1, 1e-2, 1e-3, 0.0}) {
        const JointState s{at.q, speed * dir};
        const Vector u_nom = nominal_torque(scn.nominal, *scn.model, s, at.t);
        const double h = h_value(*scn.model, scn.constraint, scn.barrier, s);
        const auto outcome = baseline_qp_control(*scn.model, scn.constraint, scn.barrier, s, u_nom,
                                                 linear_class_k(scn.baseline_alpha_gain));
        if (const auto* u = std::get_if<Vector>(&outcome)) {
            const double correction = (*u - u_nom).norm();
            std::printf("%12.3g %12.5g %14.6g %16.6g %10s\n", speed, h, u->norm(), correction,
                        previous > 0.0 ? real(correction / previous).c_str() : "-");
            previous = correction;
        } else {
            std::printf("%12.3g %12.5g %14s %16s %10s\n", speed, h, "infeasible", "infeasible", "-");
        }
    }
}

int cmd_baseline(const RunOverrides& o) {
    ScenarioFile file = load_with_overrides(o);
    Scenario baseline = file.scenario;
    baseline.mode = ControlMode::BaselineQp;
    Scenario proposed = file.scenario;
    proposed.mode = ControlMode::Safe;

    const Trajectory base_traj = simulate(baseline);
    const Trajectory safe_traj = simulate(proposed);
    if (!o.out_path.empty()) write_csv_file(base_traj, o.out_path);

    const auto bs = base_traj.summary();
    const auto ss = safe_traj.summary();
    std::cout << "scenario=" << file.scenario.name << '\n';
    char header[200];
    std::snprintf(header, sizeof header, "%-10s %12s %12s %12s %12s %12s %10s\n", "controller",
                  "min_h", "min_c", "max_v_sq", "peak_|u|", "infeasible", "frac_C_eps");
    std::cout << header;
    print_comparison_row("baseline", bs);
    print_comparison_row("proposed", ss);

    double max_torque_gap = 0.0;
    for (std::size_t k = 0; k < base_traj.records.size(); ++k) {
        max_torque_gap = std::max(
            max_torque_gap,
            (base_traj.records[k].u - safe_traj.records[k].u).cwiseAbs().maxCoeff());
    }
    std::cout << "baseline.infeasible=" << bs.baseline_infeasible_count << '\n'
              << "baseline.peak_u_norm=" << real(bs.peak_u_norm) << '\n'
              << "proposed.peak_u_norm=" << real(ss.peak_u_norm) << '\n'
              << "max_torque_difference=" << real(max_torque_gap) << '\n';
    print_shrinking_speed_sweep(baseline, safe_traj);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Safe, passive barrier control: simulate, calibrate, verify, baseline"};
    app.require_subcommand(1);

    RunOverrides sim_opts;
    auto* sim = app.add_subcommand("simulate", "Run a scenario and write its trajectory CSV");
    add_run_flags(sim, sim_opts, true);

    RunOverrides cal_opts;
    auto* cal = app.add_subcommand("calibrate", "Estimate mu1, c_bar and the admissible k_h");
    add_run_flags(cal, cal_opts, false);

    VerifyArgs ver_opts;
    auto* ver = app.add_subcommand("verify", "Check a trajectory CSV against the safety properties");
    ver->add_option("trajectory", ver_opts.traj_path, "Trajectory CSV")->required();
    ver->add_option("--scenario", ver_opts.scenario_path, "Take v_bar and tolerances from a scenario");
    ver->add_option("--vbar", ver_opts.v_bar, "Velocity bound for the velocity check");
    ver->add_option("--tol-invariance", ver_opts.tol_invariance);
    ver->add_option("--tol-velocity", ver_opts.tol_velocity);
    ver->add_option("--tol-passivity", ver_opts.tol_passivity);
    ver->add_option("--tol-return", ver_opts.tol_return);
    ver->add_option("--return-window", ver_opts.return_window);
    ver->add_option("--rest-speed", ver_opts.rest_speed);

    RunOverrides base_opts;
    auto* base = app.add_subcommand("baseline", "Compare against the zeroing-barrier QP filter");
    add_run_flags(base, base_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*sim) return cmd_simulate(sim_opts);
        if (*cal) return cmd_calibrate(cal_opts);
        if (*ver) return cmd_verify(ver_opts);
        if (*base) return cmd_baseline(base_opts);
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const CsvFormatError& e) {
        std::cerr << "trajectory error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitInputError;
}
