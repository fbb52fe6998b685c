#pragma once

#include "safepass/constraints.hpp"

namespace safepass {

enum class BlendCurve { Cubic, Linear };

struct BarrierConfig {
    double k_h = 0.25;
    double epsilon = 0.1;
    BlendCurve kappa = BlendCurve::Cubic;
    double v_bar = 36.0;

    void validate() const;
};

/// h(q, v) = k_h c(q) - 1/2 v^T M(q) v.
double h_value(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
               const JointState& s);

/// Cubic smoothstep -2 h^3 / eps^3 + 3 h^2 / eps^2 on [0, eps].
double kappa_cubic(double h, double eps);
double kappa_linear(double h, double eps);
double kappa(BlendCurve curve, double h, double eps);

/// 0 below 0, kappa(h) on [0, eps], 1 above eps.
double phi_eps(double h, const BarrierConfig& cfg);

inline bool in_safe_set(double h) { return h >= 0.0; }
inline bool in_c_eps(double h, const BarrierConfig& cfg) { return h >= cfg.epsilon; }
bool in_safe_set(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
                 const JointState& s);
bool in_c_eps(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
              const JointState& s);

/// dh/dt along the flow with torque u and disturbance mu:
///   v^T (k_h grad_c + g - u - mu + F v).
/// Skew-symmetry of dM/dt - 2C removes every inertial term.
double hdot_exact(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
                  const JointState& s, const Vector& u);
double hdot_exact(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
                  const JointState& s, const Vector& u, const Vector& mu);

/// v^T (k_h grad_c + g - u), a lower bound of hdot_exact for mu = 0.
double hdot_lower_bound(const MechanicalModel& model, const EllipsoidSpec& spec,
                        const BarrierConfig& cfg, const JointState& s, const Vector& u);

/// Everything the controllers need at one state, evaluated once.
struct BarrierTerms {
    double c = 0.0;
    Vector grad_c;
    Vector gravity;
    double kinetic = 0.0;
    double h = 0.0;

    /// g + k_h grad_c, the torque applied on and outside the safe-set boundary.
    Vector restoring_torque(const BarrierConfig& cfg) const { return gravity + cfg.k_h * grad_c; }
};

BarrierTerms evaluate_barrier(const MechanicalModel& model, const EllipsoidSpec& spec,
                              const BarrierConfig& cfg, const JointState& s);

}  // namespace safepass
