// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "safepass/scenario.hpp"
#include "safepass/trajectory_io.hpp"
#include "safepass/verify.hpp"

using namespace safepass;

namespace {

std::string scenario_path(const std::string& name) {
    return std::string(SAFEPASS_SCENARIO_DIR) + "/" + name + ".json";
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome structural_sweep() {
    const auto start = std::chrono::steady_clock::now();
    StructuralCheckOptions opts;
    opts.samples = 1000;
    opts.seed = 2024;

    const TwoLinkArmModel arm;
    EllipsoidSpec task;
    task.center = Vector{{0.43, -0.12}};
    task.shape = Vector{{1.78, 4.95}}.asDiagonal();
    auto reports = check_structural(arm, opts, &task);

    const PointMassModel pm(1.0, 2, 0.1);
    EllipsoidSpec joint;
    joint.center = Vector::Zero(2);
    joint.shape = Matrix::Identity(2, 2);
    joint.space = ConstraintSpace::Joint;
    const auto pm_reports = check_structural(pm, opts, &joint);
    reports.insert(reports.end(), pm_reports.begin(), pm_reports.end());

    const double elapsed = seconds_since(start);
    double worst_skew = 0.0;
    for (const auto& r : reports) {
        if (r.name == "skew_symmetry") worst_skew = std::min(worst_skew, r.worst_margin);
    }
    const bool checks_ok = std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.passed(); });
    return {checks_ok && elapsed < 5.0,
            fmt("%zu checks over 2 models, worst relative skew residual %.2e, %.2f s", reports.size(),
                -worst_skew, elapsed)};
}

// Rejection-sample states with h >= 0 and count those leaving Q x V.
struct Containment {
    std::size_t accepted = 0;
    std::size_t violations = 0;
    std::size_t drawn = 0;
};

Containment rejection_sample(const ScenarioFile& file, double v_range, std::size_t target) {
    const Scenario& scn = file.scenario;
    const int n = scn.model->dof();
    std::mt19937_64 rng(scn.seed + 1000);
    const Vector lo = file.calibration.lower;
    const Vector hi = file.calibration.upper;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Containment out;
    while (out.accepted < target && out.drawn < 1000 * target) {
        ++out.drawn;
        JointState s{Vector(n), Vector(n)};
        for (int j = 0; j < n; ++j) s.q(j) = lo(j) + (hi(j) - lo(j)) * unit(rng);
        for (int j = 0; j < n; ++j) s.v(j) = v_range * (2.0 * unit(rng) - 1.0);
        if (h_value(*scn.model, scn.constraint, scn.barrier, s) < 0.0) continue;
        ++out.accepted;
        const bool in_q = c_value(scn.constraint, *scn.model, s.q) >= 0.0;
        const bool in_v = s.v.squaredNorm() <= scn.barrier.v_bar;
        if (!in_q || !in_v) ++out.violations;
    }
    return out;
}

Outcome velocity_containment() {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioFile arm_file = load_scenario(scenario_path("tracking_violation"));
    const ScenarioFile pm_file = load_scenario(scenario_path("point_mass_unit"));
    bool ok = true;
    std::string detail;
    for (const auto* file : {&arm_file, &pm_file}) {
        const Scenario& scn = file->scenario;
        const auto cal = calibrate_gain(scn.constraint, *scn.model, scn.barrier.k_h, scn.barrier.v_bar,
                                        file->calibration.sampler(scn.seed));
        // Speeds range past sqrt(v_bar).
        const double v_range = 1.5 * std::sqrt(scn.barrier.v_bar / scn.model->dof()) * 2.0;
        const auto res = rejection_sample(*file, v_range, 10000);
        ok = ok && cal.admissible() && res.accepted == 10000 && res.violations == 0;
        detail += fmt("%s k_h=%.3g<=%.4g: %zu/%zu violations; ", scn.model->name().c_str(), cal.kh,
                      cal.kh_max, res.violations, res.accepted);
    }
    const double elapsed = seconds_since(start);
    return {ok && elapsed < 10.0, detail + fmt("%.2f s", elapsed)};
}

Outcome invariance() {
    const ScenarioFile safe = load_scenario(scenario_path("tracking_violation"));
    auto start = std::chrono::steady_clock::now();
    const auto s = simulate(safe.scenario).summary();
    const double safe_time = seconds_since(start);

    const ScenarioFile raw = load_scenario(scenario_path("tracking_raw_nominal"));
    start = std::chrono::steady_clock::now();
    const auto r = simulate(raw.scenario).summary();
    const double raw_time = seconds_since(start);

    const auto& b = safe.scenario.barrier;
    const bool params = b.k_h == 0.25 && b.epsilon == 0.1 && b.kappa == BlendCurve::Cubic &&
                        safe.scenario.dt == 1e-3 && safe.scenario.duration == 60.0 &&
                        !safe.scenario.zero_order_hold;
    const bool ok = params && s.min_h >= -5e-4 && s.min_c >= 0.0 && r.min_c < -0.05 &&
                    safe_time < 2.0 && raw_time < 2.0;
    return {ok, fmt("safe: min h=%.3e min c=%.3e (%.2f s); raw u_nom: min c=%.3f (%.2f s)", s.min_h,
                    s.min_c, safe_time, r.min_c, raw_time)};
}

Outcome passthrough() {
    std::size_t checked = 0;
    std::size_t scenarios = 0;
    bool ok = true;
    for (const char* name : {"tracking_violation", "human_push", "singular_sweep", "benign_inside",
                             "point_mass_unit"}) {
        const ScenarioFile file = load_scenario(scenario_path(name));
        const Trajectory traj = simulate(file.scenario);
        const auto r = check_nominal_passthrough(traj);
        ok = ok && r.passed();
        for (const auto& rec : traj.records) {
            if (rec.h < file.scenario.barrier.epsilon) continue;
            ++checked;
            for (Eigen::Index j = 0; j < rec.u.size(); ++j) ok = ok && rec.u(j) == rec.u_nom(j);
        }
        ++scenarios;
    }
    return {ok && checked > 0, fmt("%zu records with h >= eps across %zu scenarios, all u == u_nom bit-exact",
                                   checked, scenarios)};
}

Outcome passivity() {
    const ScenarioFile file = load_scenario(scenario_path("human_push"));
    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = simulate(file.scenario);
    const double elapsed = seconds_since(start);
    const auto r = check_passivity(traj, 1e-3);
    const std::size_t windows = file.scenario.disturbance.windows().size();
    const double min_h = traj.summary().min_h;
    return {r.passed() && windows == 3 && min_h < 0.0 && elapsed < 2.0,
            fmt("%zu pushes, min h=%.3f, worst S(t2)-S(t1)-int v'mu margin %.3e (%s), %.2f s", windows,
                min_h, r.worst_margin, r.detail.c_str(), elapsed)};
}

Outcome asymptotic_return() {
    const ScenarioFile file = load_scenario(scenario_path("human_push"));
    const Scenario& scn = file.scenario;
    const Trajectory traj = simulate(scn);
    const double t_off = scn.disturbance.windows().back().end;
    std::size_t release = 0;
    while (release < traj.records.size() && traj.records[release].t < t_off) ++release;
    const double h_release = traj.records.at(release).h;
    double min_grad = 1e300;
    double recovered_at = -1.0;
    bool stays = true;
    for (std::size_t k = release; k < traj.records.size(); ++k) {
        const auto& rec = traj.records[k];
        const bool within = std::max(0.0, -rec.h) <= 1e-3;
        if (!within) {
            min_grad = std::min(min_grad, grad_c(scn.constraint, *scn.model, rec.q).norm());
            if (recovered_at >= 0.0) stays = false;
        } else if (recovered_at < 0.0) {
            recovered_at = rec.t;
        }
    }
    const auto r = check_asymptotic_return(traj, 5.0, 1e-3, file.tolerances.rest_speed);
    const bool ok = h_release < 0.0 && min_grad > 0.0 && r.passed() && recovered_at >= 0.0 &&
                    recovered_at - t_off <= 5.0 && stays;
    return {ok, fmt("release at t=%.2f with h=%.3f, min |grad c| on path %.3f, back within 1e-3 after %.3f s",
                    t_off, h_release, min_grad, recovered_at - t_off)};
}

Outcome baseline_blowup() {
    const auto start = std::chrono::steady_clock::now();
    const PointMassModel pm(1.0, 2, 0.0);
    EllipsoidSpec spec;
    spec.center = Vector::Zero(2);
    spec.shape = Matrix::Identity(2, 2);
    spec.space = ConstraintSpace::Joint;
    const BarrierConfig cfg{0.5, 0.1, BlendCurve::Cubic, 1.0};
    const Vector q{{1.5, 0.0}};
    const Vector u_nom = Vector::Zero(2);
    // Speed direction tangent to the level set, so v^T grad c = 0.
    const Vector dir{{0.0, 1.0}};
    const auto alpha = linear_class_k(1.0);
    std::vector<double> norms;
    for (double speed : {1e-1, 1e-2, 1e-3}) {
        const auto out = baseline_qp_control(pm, spec, cfg, JointState{q, speed * dir}, u_nom, alpha);
        if (!std::holds_alternative<Vector>(out)) return {false, "unexpected infeasibility at v != 0"};
        norms.push_back(std::get<Vector>(out).norm());
    }
    const auto at_rest = baseline_qp_control(pm, spec, cfg, JointState{q, Vector::Zero(2)}, u_nom, alpha);
    const bool infeasible = std::holds_alternative<BaselineInfeasible>(at_rest);
    const double g1 = norms[1] / norms[0];
    const double g2 = norms[2] / norms[1];
    const double elapsed = seconds_since(start);
    return {g1 >= 9.0 && g2 >= 9.0 && infeasible && elapsed < 1.0,
            fmt("|u| = %.4g, %.4g, %.4g (growth %.3fx, %.3fx per decade); v=0: %s", norms[0], norms[1],
                norms[2], g1, g2, infeasible ? "infeasible reported" : "no report")};
}

double harmonic_error(double dt) {
    const double amp = 2.0;
    const double w = 3.0;
    const PointMassModel pm(1.0, 1);
    const ControlLaw u = [&](const JointState&, double t) { return Vector::Constant(1, amp * std::sin(w * t)); };
    JointState s{Vector::Constant(1, 0.2), Vector::Constant(1, -0.4)};
    const double horizon = 2.0;
    const auto steps = static_cast<int>(std::llround(horizon / dt));
    for (int k = 0; k < steps; ++k) s = rk4_step(pm, u, DisturbanceProfile{}, s, k * dt, dt);
    const double exact = 0.2 + (-0.4 + amp / w) * horizon - amp / (w * w) * std::sin(w * horizon);
    return std::abs(s.q(0) - exact);
}

Outcome integrator_order() {
    const auto start = std::chrono::steady_clock::now();
    const double e1 = harmonic_error(0.02);
    const double e2 = harmonic_error(0.01);
    const double ratio = e1 / e2;
    const double elapsed = seconds_since(start);
    return {ratio >= 12.0 && ratio <= 20.0 && elapsed < 1.0,
            fmt("endpoint error %.3e -> %.3e, ratio %.2f", e1, e2, ratio)};
}

Outcome singularity() {
    const ScenarioFile file = load_scenario(scenario_path("singular_sweep"));
    Trajectory traj;
    try {
        traj = simulate(file.scenario);
    } catch (const DivergenceError& e) {
        return {false, std::string("divergence: ") + e.what()};
    }
    double q2_lo = 1e300;
    double q2_hi = -1e300;
    std::vector<double> norms;
    bool finite = true;
    for (const auto& r : traj.records) {
        q2_lo = std::min(q2_lo, r.q(1));
        q2_hi = std::max(q2_hi, r.q(1));
        finite = finite && r.u.allFinite();
        norms.push_back(r.u.norm());
    }
    std::vector<double> sorted = norms;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double peak = *std::max_element(norms.begin(), norms.end());
    const bool crosses = q2_lo < std::numbers::pi && q2_hi > std::numbers::pi;
    return {finite && crosses && peak <= 10.0 * median,
            fmt("q2 in [%.3f, %.3f], peak |u| %.3f = %.2fx median", q2_lo, q2_hi, peak, peak / median)};
}

Outcome determinism() {
    std::size_t count = 0;
    bool ok = true;
    for (const char* name : {"benign_inside", "human_push", "point_mass_unit", "push_to_rest_baseline",
                             "singular_sweep", "tracking_raw_nominal", "tracking_violation"}) {
        const ScenarioFile file = load_scenario(scenario_path(name));
        std::ostringstream a;
        std::ostringstream b;
        write_csv(simulate(file.scenario), a);
        write_csv(simulate(file.scenario), b);
        ok = ok && a.str() == b.str() && !a.str().empty();
        ++count;
    }
    return {ok, fmt("%zu shipped scenarios, two runs each, CSV bytes identical", count)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"structural sweep", structural_sweep},
        {"velocity-bound containment", velocity_containment},
        {"forward invariance", invariance},
        {"nominal passthrough", passthrough},
        {"passivity", passivity},
        {"asymptotic return", asymptotic_return},
        {"baseline ill-posedness", baseline_blowup},
        {"integrator order", integrator_order},
        {"singularity totality", singularity},
        {"determinism", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        std::printf("[%s] %2d %-28s %s\n", out.pass ? "PASS" : "FAIL", index, name.c_str(), out.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
