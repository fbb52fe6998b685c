#include "safepass/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace safepass {

ReferenceSample SinusoidReference::at(double t) const {
    const Eigen::ArrayXd arg = frequency.array() * t + phase.array();
    const Eigen::ArrayXd s = arg.sin();
    const Eigen::ArrayXd c = arg.cos();
    ReferenceSample r;
    r.q = offset.array() + amplitude.array() * s;
    r.v = amplitude.array() * frequency.array() * c;
    r.a = -amplitude.array() * frequency.array().square() * s;
    return r;
}

void SinusoidReference::validate(int n) const {
    if (offset.size() != n || amplitude.size() != n || frequency.size() != n || phase.size() != n) {
        throw std::invalid_argument("reference dimension does not match the model");
    }
    if (!offset.allFinite() || !amplitude.allFinite() || !frequency.allFinite() ||
        !phase.allFinite()) {
        throw std::invalid_argument("reference parameters must be finite");
    }
}

Vector nominal_gravity_comp(const MechanicalModel& model, const JointState& s) {
    return model.gravity_vector(s.q);
}

Vector nominal_inverse_dynamics(const MechanicalModel& model, const JointState& s,
                                const InverseDynamicsTracker& tracker, double t) {
    const ReferenceSample ref = tracker.reference.at(t);
    const Vector e = ref.q - s.q;
    const Vector de = ref.v - s.v;
    const Vector a = ref.a + tracker.kp.cwiseProduct(e) + tracker.kd.cwiseProduct(de);
    return model.mass_matrix(s.q) * a + model.coriolis_matrix(s.q, s.v) * s.v +
           model.damping() * s.v + model.gravity_vector(s.q);
}

Vector nominal_torque(const NominalController& nominal, const MechanicalModel& model,
                      const JointState& s, double t) {
    struct Visitor {
        const MechanicalModel& model;
        const JointState& s;
        double t;
        Vector operator()(const GravityCompensation&) const { return nominal_gravity_comp(model, s); }
        Vector operator()(const InverseDynamicsTracker& c) const {
            return nominal_inverse_dynamics(model, s, c, t);
        }
        Vector operator()(const ConstantTorque& c) const { return c.torque; }
    };
    return std::visit(Visitor{model, s, t}, nominal);
}

void validate_nominal(const NominalController& nominal, int n) {
    if (const auto* tracker = std::get_if<InverseDynamicsTracker>(&nominal)) {
        if (tracker->kp.size() != n || tracker->kd.size() != n) {
            throw std::invalid_argument("tracker gain dimension does not match the model");
        }
        if (!tracker->kp.allFinite() || !tracker->kd.allFinite()) {
            throw std::invalid_argument("tracker gains must be finite");
        }
        tracker->reference.validate(n);
    } else if (const auto* constant = std::get_if<ConstantTorque>(&nominal)) {
        if (constant->torque.size() != n || !constant->torque.allFinite()) {
            throw std::invalid_argument("constant torque must be finite with one entry per joint");
        }
    }
}

// ---------------------------------------------------------------------------

SafeController::SafeController(EllipsoidSpec constraint, BarrierConfig barrier,
                               NominalController nominal)
    : constraint_(std::move(constraint)), barrier_(barrier), nominal_(std::move(nominal)) {
    barrier_.validate();
}

Vector blend_torque(const BarrierTerms& terms, const BarrierConfig& cfg, const Vector& u_nom,
                    double* phi_out) {
    // Branch before any arithmetic so C_eps returns u_nom bit for bit.
    if (terms.h >= cfg.epsilon) {
        if (phi_out) *phi_out = 1.0;
        return u_nom;
    }
    if (terms.h < 0.0) {
        if (phi_out) *phi_out = 0.0;
        return terms.restoring_torque(cfg);
    }
    const double phi = phi_eps(terms.h, cfg);
    if (phi_out) *phi_out = phi;
    return (1.0 - phi) * terms.restoring_torque(cfg) + phi * u_nom;
}

SafeController::Output SafeController::evaluate(const MechanicalModel& model, const JointState& s,
                                                double t) const {
    const BarrierTerms terms = evaluate_barrier(model, constraint_, barrier_, s);
    Output out;
    out.u_nom = nominal_torque(nominal_, model, s, t);
    out.c = terms.c;
    out.h = terms.h;
    out.u = blend_torque(terms, barrier_, out.u_nom, &out.phi);
    return out;
}

Vector safe_control(const SafeController& ctrl, const MechanicalModel& model, const JointState& s,
                    double t) {
    return ctrl.evaluate(model, s, t).u;
}

bool in_Ku(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
           const JointState& s, const Vector& u) {
    return hdot_lower_bound(model, spec, cfg, s, u) >= 0.0;
}

BaselineOutcome baseline_qp_control(const MechanicalModel& model, const EllipsoidSpec& spec,
                                    const BarrierConfig& cfg, const JointState& s,
                                    const Vector& u_nom, const ClassKFunction& alpha) {
    const BarrierTerms terms = evaluate_barrier(model, spec, cfg, s);
    const double alpha_h = alpha(terms.h);
    // Constraint a^T u <= b with a = v, b = v^T (k_h grad_c + g) + alpha(h).
    const double slack = s.v.dot(terms.restoring_torque(cfg) - u_nom) + alpha_h;
    if (slack >= 0.0) {
        return u_nom;
    }
    const double v_sq = s.v.squaredNorm();
    if (v_sq == 0.0) {
        return BaselineInfeasible{terms.h, alpha_h};
    }
    return Vector(u_nom + (slack / v_sq) * s.v);
}

}  // namespace safepass
