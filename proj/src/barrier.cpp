#include "safepass/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace safepass {

void BarrierConfig::validate() const {
    if (!(k_h > 0.0) || !std::isfinite(k_h)) throw std::invalid_argument("k_h must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    if (!(v_bar > 0.0) || !std::isfinite(v_bar)) throw std::invalid_argument("v_bar must be positive");
}

double h_value(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
               const JointState& s) {
    return cfg.k_h * c_value(spec, model, s.q) - kinetic_energy(model, s);
}

double kappa_cubic(double h, double eps) {
    const double r = h / eps;
    return r * r * (3.0 - 2.0 * r);
}

double kappa_linear(double h, double eps) { return h / eps; }

double kappa(BlendCurve curve, double h, double eps) {
    const double k = curve == BlendCurve::Cubic ? kappa_cubic(h, eps) : kappa_linear(h, eps);
    return std::clamp(k, 0.0, 1.0);
}

double phi_eps(double h, const BarrierConfig& cfg) {
    if (h > cfg.epsilon) return 1.0;
    if (h < 0.0) return 0.0;
    return kappa(cfg.kappa, h, cfg.epsilon);
}

bool in_safe_set(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
                 const JointState& s) {
    return in_safe_set(h_value(model, spec, cfg, s));
}

bool in_c_eps(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
              const JointState& s) {
    return in_c_eps(h_value(model, spec, cfg, s), cfg);
}

double hdot_exact(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
                  const JointState& s, const Vector& u, const Vector& mu) {
    const Vector drive = cfg.k_h * grad_c(spec, model, s.q) + model.gravity_vector(s.q) - u - mu +
                         model.damping() * s.v;
    return s.v.dot(drive);
}

double hdot_exact(const MechanicalModel& model, const EllipsoidSpec& spec, const BarrierConfig& cfg,
                  const JointState& s, const Vector& u) {
    return hdot_exact(model, spec, cfg, s, u, Vector::Zero(s.v.size()));
}

double hdot_lower_bound(const MechanicalModel& model, const EllipsoidSpec& spec,
                        const BarrierConfig& cfg, const JointState& s, const Vector& u) {
    return s.v.dot(cfg.k_h * grad_c(spec, model, s.q) + model.gravity_vector(s.q) - u);
}

BarrierTerms evaluate_barrier(const MechanicalModel& model, const EllipsoidSpec& spec,
                              const BarrierConfig& cfg, const JointState& s) {
    BarrierTerms t;
    t.c = c_value(spec, model, s.q);
    t.grad_c = grad_c(spec, model, s.q);
    t.gravity = model.gravity_vector(s.q);
    t.kinetic = kinetic_energy(model, s);
    t.h = cfg.k_h * t.c - t.kinetic;
    return t;
}

}  // namespace safepass
