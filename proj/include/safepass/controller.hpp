#pragma once

#include <functional>
#include <variant>

#include "safepass/barrier.hpp"

namespace safepass {

struct ReferenceSample {
    Vector q;
    Vector v;
    Vector a;
};

/// Per-joint q_d(t) = offset + amplitude * sin(frequency * t + phase), with
/// frequency in rad/s. Smooth, so the tracker it feeds is locally Lipschitz.
struct SinusoidReference {
    Vector offset;
    Vector amplitude;
    Vector frequency;
    Vector phase;

    ReferenceSample at(double t) const;
    int dof() const { return static_cast<int>(offset.size()); }
    void validate(int n) const;
};

struct GravityCompensation {};

/// Computed-torque tracker M (a_d + Kp e + Kd de) + C v + F v + g, e = q_d - q.
struct InverseDynamicsTracker {
    Vector kp;
    Vector kd;
    SinusoidReference reference;
};

struct ConstantTorque {
    Vector torque;
};

using NominalController = std::variant<GravityCompensation, InverseDynamicsTracker, ConstantTorque>;

Vector nominal_gravity_comp(const MechanicalModel& model, const JointState& s);
Vector nominal_inverse_dynamics(const MechanicalModel& model, const JointState& s,
                                const InverseDynamicsTracker& tracker, double t);
Vector nominal_torque(const NominalController& nominal, const MechanicalModel& model,
                      const JointState& s, double t);
void validate_nominal(const NominalController& nominal, int n);

/// Blended safety controller
///   u = (1 - phi(h)) (g + k_h grad_c) + phi(h) u_nom.
/// Total on every finite state: nothing is inverted or optimized.
class SafeController {
public:
    struct Output {
        Vector u;
        Vector u_nom;
        double c = 0.0;
        double h = 0.0;
        double phi = 0.0;
    };

    SafeController(EllipsoidSpec constraint, BarrierConfig barrier, NominalController nominal);

    /// Inside C_eps (h >= eps) the result is u_nom itself, bit for bit; below
    /// zero it is exactly g + k_h grad_c.
    Output evaluate(const MechanicalModel& model, const JointState& s, double t) const;

    const EllipsoidSpec& constraint() const { return constraint_; }
    const BarrierConfig& barrier() const { return barrier_; }
    const NominalController& nominal() const { return nominal_; }

private:
    EllipsoidSpec constraint_;
    BarrierConfig barrier_;
    NominalController nominal_;
};

Vector safe_control(const SafeController& ctrl, const MechanicalModel& model, const JointState& s,
                    double t);

/// Blend of a precomputed nominal torque; shared by the controller and tests.
Vector blend_torque(const BarrierTerms& terms, const BarrierConfig& cfg, const Vector& u_nom,
                    double* phi_out = nullptr);

/// u in K_u(q, v)  <=>  v^T (k_h grad_c + g - u) >= 0.
bool in_Ku(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
           const JointState& s, const Vector& u);

// ---------------------------------------------------------------------------
// Zeroing-barrier QP baseline:
//   min |u - u_nom|^2  s.t.  v^T (k_h grad_c + g - u) >= -alpha(h)

using ClassKFunction = std::function<double(double)>;

inline ClassKFunction linear_class_k(double gain) {
    return [gain](double h) { return gain * h; };
}

/// The QP has no solution: v = 0 while alpha(h) < 0.
struct BaselineInfeasible {
    double h = 0.0;
    double alpha_h = 0.0;
};

using BaselineOutcome = std::variant<Vector, BaselineInfeasible>;

/// Closed-form half-space projection of u_nom. Never fabricates a torque when
/// the constraint set is empty.
BaselineOutcome baseline_qp_control(const MechanicalModel& model, const EllipsoidSpec& spec,
                                    const BarrierConfig& cfg, const JointState& s,
                                    const Vector& u_nom, const ClassKFunction& alpha);

}  // namespace safepass
