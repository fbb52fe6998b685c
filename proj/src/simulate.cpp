#include "safepass/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace safepass {

DisturbanceProfile::DisturbanceProfile(std::vector<DisturbanceWindow> windows)
    : windows_(std::move(windows)) {}

Vector DisturbanceProfile::at(double t, int n) const {
    for (const auto& w : windows_) {
        if (t >= w.start && t < w.end) return w.torque;
    }
    return Vector::Zero(n);
}

void DisturbanceProfile::validate(int n) const {
    double previous_end = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        const auto& w = windows_[i];
        const std::string where = "disturbance window " + std::to_string(i);
        if (!std::isfinite(w.start) || !std::isfinite(w.end) || !(w.start < w.end)) {
            throw std::invalid_argument(where + ": need finite start < end");
        }
        if (w.start < previous_end) {
            throw std::invalid_argument(where + ": windows must be ordered and non-overlapping");
        }
        if (w.torque.size() != n || !w.torque.allFinite()) {
            throw std::invalid_argument(where + ": torque must be finite with one entry per joint");
        }
        previous_end = w.end;
    }
}

void Scenario::validate() const {
    if (!model) throw std::invalid_argument("scenario has no model");
    const int n = model->dof();
    constraint.validate(*model);
    barrier.validate();
    validate_nominal(nominal, n);
    disturbance.validate(n);
    initial.validate();
    if (initial.dof() != n) {
        throw std::invalid_argument("initial state dimension does not match the model");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
    if (!(duration >= dt) || !std::isfinite(duration)) {
        throw std::invalid_argument("duration must be at least dt");
    }
    if (mode == ControlMode::BaselineQp && !(baseline_alpha_gain > 0.0)) {
        throw std::invalid_argument("baseline alpha gain must be positive");
    }
}

std::size_t Scenario::step_count() const {
    return static_cast<std::size_t>(std::llround(duration / dt));
}

// ---------------------------------------------------------------------------

TrajectorySummary Trajectory::summary() const {
    TrajectorySummary s;
    if (records.empty()) return s;
    s.min_h = std::numeric_limits<double>::infinity();
    s.min_c = std::numeric_limits<double>::infinity();
    std::size_t inside = 0;
    for (const auto& r : records) {
        s.min_h = std::min(s.min_h, r.h);
        s.min_c = std::min(s.min_c, r.c);
        s.max_v_sq = std::max(s.max_v_sq, r.v.squaredNorm());
        s.peak_u_norm = std::max(s.peak_u_norm, r.u.norm());
        if (r.in_c_eps) ++inside;
        if (r.baseline_infeasible) ++s.baseline_infeasible_count;
    }
    s.fraction_in_c_eps = static_cast<double>(inside) / static_cast<double>(records.size());
    return s;
}

namespace {

void check_divergence(const JointState& s, double t) {
    const bool finite = s.q.allFinite() && s.v.allFinite();
    const double worst = finite ? std::max(s.q.cwiseAbs().maxCoeff(), s.v.cwiseAbs().maxCoeff())
                                : std::numeric_limits<double>::infinity();
    if (!(worst <= kDivergenceLimit)) {
        std::ostringstream msg;
        msg << "simulation diverged at t = " << t << " (state magnitude " << worst << ")";
        throw DivergenceError(t, msg.str());
    }
}

struct ControlSample {
    Vector u;
    Vector u_nom;
    double c = 0.0;
    double h = 0.0;
    double phi = 0.0;
    bool infeasible = false;
};

ControlSample sample_control(const Scenario& scn, const SafeController& ctrl, const JointState& s,
                             double t) {
    const MechanicalModel& model = *scn.model;
    ControlSample out;
    if (scn.mode == ControlMode::Safe) {
        auto o = ctrl.evaluate(model, s, t);
        out.u = std::move(o.u);
        out.u_nom = std::move(o.u_nom);
        out.c = o.c;
        out.h = o.h;
        out.phi = o.phi;
        return out;
    }
    const BarrierTerms terms = evaluate_barrier(model, scn.constraint, scn.barrier, s);
    out.u_nom = nominal_torque(scn.nominal, model, s, t);
    out.c = terms.c;
    out.h = terms.h;
    out.phi = phi_eps(terms.h, scn.barrier);
    if (scn.mode == ControlMode::Nominal) {
        out.u = out.u_nom;
        return out;
    }
    auto outcome = baseline_qp_control(model, scn.constraint, scn.barrier, s, out.u_nom,
                                       linear_class_k(scn.baseline_alpha_gain));
    if (auto* u = std::get_if<Vector>(&outcome)) {
        out.u = std::move(*u);
    } else {
        // No admissible torque exists; the plant keeps receiving u_nom and the
        // event is counted.
        out.u = out.u_nom;
        out.infeasible = true;
    }
    return out;
}

}  // namespace

JointState rk4_step(const MechanicalModel& model, const ControlLaw& control,
                    const DisturbanceProfile& profile, const JointState& s, double t, double dt) {
    const int n = model.dof();
    auto deriv = [&](const JointState& x, double tau, Vector& dq, Vector& dv) {
        dq = x.v;
        dv = acceleration(model, x, control(x, tau), profile.at(tau, n));
    };
    Vector k1q, k1v, k2q, k2v, k3q, k3v, k4q, k4v;
    deriv(s, t, k1q, k1v);
    deriv({s.q + 0.5 * dt * k1q, s.v + 0.5 * dt * k1v}, t + 0.5 * dt, k2q, k2v);
    deriv({s.q + 0.5 * dt * k2q, s.v + 0.5 * dt * k2v}, t + 0.5 * dt, k3q, k3v);
    deriv({s.q + dt * k3q, s.v + dt * k3v}, t + dt, k4q, k4v);
    JointState next{s.q + (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
                    s.v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    check_divergence(next, t + dt);
    return next;
}

Trajectory simulate(const Scenario& scn) {
    scn.validate();
    const MechanicalModel& model = *scn.model;
    const int n = model.dof();
    const SafeController ctrl(scn.constraint, scn.barrier, scn.nominal);
    const std::size_t steps = scn.step_count();

    Trajectory traj;
    traj.scenario_digest = scn.digest;
    traj.records.reserve(steps + 1);

    JointState s = scn.initial;
    check_divergence(s, 0.0);
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * scn.dt;
        ControlSample cs = sample_control(scn, ctrl, s, t);

        SimRecord r;
        r.t = t;
        r.q = s.q;
        r.v = s.v;
        r.x = model.task_position(s.q);
        r.c = cs.c;
        r.h = cs.h;
        r.phi = cs.phi;
        r.mu = scn.disturbance.at(t, n);
        r.storage = -cs.h;
        r.hdot = hdot_exact(model, scn.constraint, scn.barrier, s, cs.u, r.mu);
        r.in_c = in_safe_set(cs.h);
        r.in_c_eps = in_c_eps(cs.h, scn.barrier);
        r.baseline_infeasible = cs.infeasible;
        r.u = cs.u;
        r.u_nom = std::move(cs.u_nom);
        traj.records.push_back(std::move(r));

        if (k == steps) break;

        if (scn.zero_order_hold) {
            const Vector held = std::move(cs.u);
            s = rk4_step(model, [&held](const JointState&, double) { return held; },
                         scn.disturbance, s, t, scn.dt);
        } else {
            s = rk4_step(model,
                         [&](const JointState& x, double tau) {
                             return sample_control(scn, ctrl, x, tau).u;
                         },
                         scn.disturbance, s, t, scn.dt);
        }
    }
    return traj;
}

}  // namespace safepass
