#include "safepass/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace safepass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CheckReport make_report(std::string name, double tol) {
    CheckReport r;
    r.name = std::move(name);
    r.tolerance = tol;
    r.worst_margin = kInf;
    return r;
}

void finish(CheckReport& r, const Trajectory* traj = nullptr) {
    if (r.status != CheckStatus::PreconditionUnmet) {
        r.status = r.worst_margin < -r.tolerance ? CheckStatus::Fail : CheckStatus::Pass;
    }
    if (traj && r.worst_index < traj->records.size()) {
        r.worst_time = traj->records[r.worst_index].t;
    }
}

void track(CheckReport& r, double margin, std::size_t index) {
    if (margin < r.worst_margin) {
        r.worst_margin = margin;
        r.worst_index = index;
    }
}

bool disturbed(const SimRecord& r) { return r.mu.size() > 0 && r.mu.cwiseAbs().maxCoeff() > 0.0; }

}  // namespace

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass:
            return "pass";
        case CheckStatus::Fail:
            return "FAIL";
        case CheckStatus::PreconditionUnmet:
            return "precondition-unmet";
    }
    return "unknown";
}

CheckReport check_forward_invariance(const Trajectory& traj, double tol) {
    CheckReport r = make_report("forward_invariance", tol);
    const auto& rec = traj.records;
    if (rec.empty() || rec.front().h < 0.0) {
        r.status = CheckStatus::PreconditionUnmet;
        r.detail = rec.empty() ? "empty trajectory" : "initial state is outside the safe set";
        if (!rec.empty()) r.worst_margin = rec.front().h;
        finish(r, &traj);
        return r;
    }
    bool armed = true;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (disturbed(rec[k])) {
            armed = false;
            continue;
        }
        if (!armed && rec[k].h >= 0.0) armed = true;
        if (armed) track(r, rec[k].h, k);
    }
    finish(r, &traj);
    r.detail = "min h over undisturbed in-C stretches";
    return r;
}

CheckReport check_velocity_bound(const Trajectory& traj, double v_bar, double tol) {
    CheckReport r = make_report("velocity_bound", tol);
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const auto& rec = traj.records[k];
        if (rec.h >= 0.0) track(r, v_bar - rec.v.squaredNorm(), k);
    }
    finish(r, &traj);
    std::ostringstream d;
    d << "v_bar - |v|^2 on records with h >= 0 (v_bar = " << v_bar << ")";
    r.detail = d.str();
    return r;
}

CheckReport check_passivity(const Trajectory& traj, double tol) {
    CheckReport r = make_report("passivity", tol);
    const auto& rec = traj.records;
    std::size_t segments = 0;
    std::size_t k = 0;
    while (k < rec.size()) {
        if (rec[k].h > 0.0) {
            ++k;
            continue;
        }
        ++segments;
        const std::size_t start = k;
        double supplied = 0.0;
        for (std::size_t j = start; j < rec.size() && rec[j].h <= 0.0; ++j) {
            k = j + 1;
            if (j == start) continue;
            const double dt = rec[j].t - rec[j - 1].t;
            supplied += 0.5 * dt * (rec[j - 1].v.dot(rec[j - 1].mu) + rec[j].v.dot(rec[j].mu));
            track(r, supplied - (rec[j].storage - rec[start].storage), j);
        }
    }
    finish(r, &traj);
    r.detail = std::to_string(segments) + " segment(s) with h <= 0";
    return r;
}

CheckReport check_asymptotic_return(const Trajectory& traj, double window, double tol,
                                    double rest_speed) {
    CheckReport r = make_report("asymptotic_return", tol);
    const auto& rec = traj.records;
    if (rec.empty()) {
        r.status = CheckStatus::PreconditionUnmet;
        r.detail = "empty trajectory";
        return r;
    }
    std::size_t release = 0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        if (disturbed(rec[k])) release = k + 1;
    }
    if (release >= rec.size()) {
        r.status = CheckStatus::PreconditionUnmet;
        r.detail = "disturbance still active at the final record";
        finish(r, &traj);
        return r;
    }
    const double t_off = rec[release].t;
    if (rec[release].h >= 0.0) {
        finish(r, &traj);
        r.detail = "released inside the safe set; nothing to recover";
        return r;
    }
    const double t_check = t_off + window;
    if (rec.back().t < t_check) {
        r.status = CheckStatus::PreconditionUnmet;
        r.detail = "trajectory ends before release + window";
        finish(r, &traj);
        return r;
    }
    double tail_speed = 0.0;
    for (std::size_t k = release; k < rec.size(); ++k) {
        if (rec[k].t < t_check) continue;
        track(r, 0.0 - std::max(0.0, -rec[k].h) + 0.0, k);
        tail_speed = std::max(tail_speed, rec[k].v.norm());
    }
    std::ostringstream d;
    d << "release at t = " << t_off << " with h = " << rec[release].h;
    if (r.worst_margin < -tol && tail_speed <= rest_speed) {
        r.status = CheckStatus::PreconditionUnmet;
        d << "; state rests outside C, so grad c vanishes there";
    }
    r.detail = d.str();
    finish(r, &traj);
    return r;
}

CheckReport check_nominal_passthrough(const Trajectory& traj) {
    CheckReport r = make_report("nominal_passthrough", 0.0);
    std::size_t checked = 0;
    for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const auto& rec = traj.records[k];
        if (!rec.in_c_eps) continue;
        ++checked;
        track(r, 0.0 - (rec.u - rec.u_nom).cwiseAbs().maxCoeff() + 0.0, k);
    }
    finish(r, &traj);
    r.detail = std::to_string(checked) + " record(s) in C_eps";
    return r;
}

std::vector<CheckReport> run_trajectory_checks(const Trajectory& traj,
                                               const TrajectoryCheckOptions& opts) {
    std::vector<CheckReport> out;
    out.push_back(check_forward_invariance(traj, opts.invariance_tol));
    if (opts.v_bar) out.push_back(check_velocity_bound(traj, *opts.v_bar, opts.velocity_tol));
    out.push_back(check_passivity(traj, opts.passivity_tol));
    out.push_back(
        check_asymptotic_return(traj, opts.return_window, opts.return_tol, opts.rest_speed));
    out.push_back(check_nominal_passthrough(traj));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<CheckReport> check_structural(const MechanicalModel& model,
                                          const StructuralCheckOptions& opts,
                                          const EllipsoidSpec* spec) {
    const int n = model.dof();
    std::mt19937_64 rng(opts.seed);
    auto uniform = [&rng](double range) {
        return range * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
    };

    CheckReport sym = make_report("inertia_symmetry", 0.0);
    CheckReport spd = make_report("inertia_positive_definite", 0.0);
    CheckReport skew = make_report("skew_symmetry", opts.skew_tol);
    CheckReport grav = make_report("gravity_gradient", opts.fd_tol);
    CheckReport jac = make_report("jacobian_fd", opts.fd_tol);
    CheckReport grad = make_report("grad_c_fd", opts.fd_tol);
    const double step = opts.fd_step;

    for (std::size_t i = 0; i < opts.samples; ++i) {
        Vector q(n), v(n);
        for (int j = 0; j < n; ++j) q(j) = uniform(opts.joint_range);
        for (int j = 0; j < n; ++j) v(j) = uniform(opts.speed_range);

        const Matrix m = model.mass_matrix(q);
        track(sym, -(m - m.transpose()).cwiseAbs().maxCoeff(), i);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
        // Strictly positive is required; a zero eigenvalue counts as failure.
        const double lam = eig.eigenvalues().minCoeff();
        track(spd, lam > 0.0 ? lam : -1.0, i);

        const Matrix mdot =
            (model.mass_matrix(q + step * v) - model.mass_matrix(q - step * v)) / (2.0 * step);
        const double residual = v.dot((mdot - 2.0 * model.coriolis_matrix(q, v)) * v);
        track(skew, -std::abs(residual) / (1.0 + v.squaredNorm()), i);

        Vector g_fd(n);
        for (int j = 0; j < n; ++j) {
            Vector dq = Vector::Zero(n);
            dq(j) = step;
            g_fd(j) = (model.potential_energy(q + dq) - model.potential_energy(q - dq)) / (2.0 * step);
        }
        track(grav, -(model.gravity_vector(q) - g_fd).cwiseAbs().maxCoeff(), i);

        const Matrix j_an = model.task_jacobian(q);
        Matrix j_fd(model.task_dim(), n);
        for (int j = 0; j < n; ++j) {
            Vector dq = Vector::Zero(n);
            dq(j) = step;
            j_fd.col(j) = (model.task_position(q + dq) - model.task_position(q - dq)) / (2.0 * step);
        }
        track(jac, -(j_an - j_fd).cwiseAbs().maxCoeff(), i);

        if (spec) {
            Vector gc_fd(n);
            for (int j = 0; j < n; ++j) {
                Vector dq = Vector::Zero(n);
                dq(j) = step;
                gc_fd(j) = (c_value(*spec, model, q + dq) - c_value(*spec, model, q - dq)) / (2.0 * step);
            }
            track(grad, -(grad_c(*spec, model, q) - gc_fd).cwiseAbs().maxCoeff(), i);
        }
    }

    std::vector<CheckReport> out{sym, spd, skew, grav, jac};
    if (spec) out.push_back(grad);
    for (auto& r : out) {
        finish(r);
        r.detail = model.name() + ", " + std::to_string(opts.samples) + " samples";
    }
    return out;
}

std::string format_reports(const std::vector<CheckReport>& reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %-19s %14s %12s %10s\n", "check", "status",
                  "worst_margin", "tolerance", "at_t");
    out << line;
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-28s %-19s %14.6g %12.3g %10.4g\n", r.name.c_str(),
                      to_string(r.status).c_str(), r.worst_margin, r.tolerance, r.worst_time);
        out << line;
    }
    for (const auto& r : reports) {
        const std::string key = "check." + r.name + ".";
        std::snprintf(line, sizeof line, "%.17g", r.worst_margin);
        out << key << "status=" << to_string(r.status) << '\n'
            << key << "worst_margin=" << line << '\n';
        std::snprintf(line, sizeof line, "%.17g", r.tolerance);
        out << key << "tolerance=" << line << '\n'
            << key << "worst_index=" << r.worst_index << '\n';
        std::snprintf(line, sizeof line, "%.17g", r.worst_time);
        out << key << "worst_time=" << line << '\n' << key << "detail=" << r.detail << '\n';
    }
    return out.str();
}

bool any_failed(const std::vector<CheckReport>& reports) {
    return std::any_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.failed(); });
}

}  // namespace safepass
