#include "safepass/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "safepass/kinematics.hpp"

namespace safepass {

bool all_finite(const Vector& x) { return x.allFinite(); }

void JointState::validate() const {
    if (q.size() < 1) {
        throw std::invalid_argument("joint state must have at least one degree of freedom");
    }
    if (q.size() != v.size()) {
        throw std::invalid_argument("joint state q and v lengths differ");
    }
    if (!q.allFinite() || !v.allFinite()) {
        throw std::invalid_argument("joint state contains non-finite entries");
    }
}

MechanicalModel::MechanicalModel(Matrix damping) : damping_(std::move(damping)) {
    if (damping_.rows() != damping_.cols()) {
        throw std::invalid_argument("damping matrix must be square");
    }
    if (!damping_.allFinite() || (damping_ - damping_.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        throw std::invalid_argument("damping matrix must be finite and symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(damping_);
    if (eig.eigenvalues().minCoeff() < 0.0) {
        throw std::invalid_argument("damping matrix must be positive semi-definite");
    }
}

// ---------------------------------------------------------------------------
// Point mass

namespace {

Matrix diagonal_damping(const Vector& diag, bool allow_zero) {
    if (!diag.allFinite() || (diag.array() < 0.0).any() ||
        (!allow_zero && (diag.array() == 0.0).any())) {
        throw std::invalid_argument(allow_zero ? "damping entries must be non-negative"
                                               : "damping entries must be positive");
    }
    return diag.asDiagonal();
}

}  // namespace

PointMassModel::PointMassModel(double mass, int dof, const Vector& damping_diag,
                               const Vector& gravity_accel)
    : MechanicalModel(diagonal_damping(damping_diag, true)),
      mass_(mass),
      dof_(dof),
      gravity_accel_(gravity_accel) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
        throw std::invalid_argument("point mass must be positive");
    }
    if (dof < 1 || damping_diag.size() != dof || gravity_accel.size() != dof) {
        throw std::invalid_argument("point mass dimension mismatch");
    }
    if (!gravity_accel.allFinite()) {
        throw std::invalid_argument("gravity must be finite");
    }
}

PointMassModel::PointMassModel(double mass, int dof, double damping)
    : PointMassModel(mass, dof, Vector::Constant(std::max(dof, 1), damping),
                     Vector::Zero(std::max(dof, 1))) {}

Matrix PointMassModel::mass_matrix(const Vector&) const {
    return mass_ * Matrix::Identity(dof_, dof_);
}

Matrix PointMassModel::coriolis_matrix(const Vector&, const Vector&) const {
    return Matrix::Zero(dof_, dof_);
}

Vector PointMassModel::gravity_vector(const Vector&) const { return -mass_ * gravity_accel_; }

double PointMassModel::potential_energy(const Vector& q) const {
    return -mass_ * gravity_accel_.dot(q);
}

Matrix PointMassModel::task_jacobian(const Vector&) const {
    return Matrix::Identity(dof_, dof_);
}

// ---------------------------------------------------------------------------
// Two-link arm

void TwoLinkParams::validate() const {
    const double positive[] = {m1, m2, l1, l2, I1, I2};
    for (double x : positive) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("two-link masses, lengths and inertias must be positive");
        }
    }
    if (!(lc1 >= 0.0) || !(lc2 >= 0.0) || !std::isfinite(lc1) || !std::isfinite(lc2)) {
        throw std::invalid_argument("two-link centre-of-mass offsets must be non-negative");
    }
    if (!(g0 >= 0.0) || !std::isfinite(g0)) {
        throw std::invalid_argument("gravity constant must be non-negative");
    }
}

TwoLinkArmModel::TwoLinkArmModel() : TwoLinkArmModel(TwoLinkParams{}) {}

TwoLinkArmModel::TwoLinkArmModel(const TwoLinkParams& params)
    : MechanicalModel(diagonal_damping(params.damping, false)), params_(params) {
    params_.validate();
}

Matrix TwoLinkArmModel::mass_matrix(const Vector& q) const {
    const auto& p = params_;
    const double c2 = std::cos(q(1));
    const double b = p.m2 * p.l1 * p.lc2;
    const double m22 = p.m2 * p.lc2 * p.lc2 + p.I2;
    const double m12 = m22 + b * c2;
    const double m11 = p.m1 * p.lc1 * p.lc1 + p.I1 + p.m2 * (p.l1 * p.l1 + p.lc2 * p.lc2) + p.I2 +
                       2.0 * b * c2;
    Matrix m(2, 2);
    m << m11, m12, m12, m22;
    return m;
}

Matrix TwoLinkArmModel::coriolis_matrix(const Vector& q, const Vector& v) const {
    // Christoffel form; the only nonzero partial is dM/dq2.
    const double hh = -params_.m2 * params_.l1 * params_.lc2 * std::sin(q(1));
    Matrix c(2, 2);
    c << hh * v(1), hh * (v(0) + v(1)), -hh * v(0), 0.0;
    return c;
}

Vector TwoLinkArmModel::gravity_vector(const Vector& q) const {
    const auto& p = params_;
    const double c1 = std::cos(q(0));
    const double c12 = std::cos(q(0) + q(1));
    Vector g(2);
    g(1) = p.m2 * p.lc2 * p.g0 * c12;
    g(0) = (p.m1 * p.lc1 + p.m2 * p.l1) * p.g0 * c1 + g(1);
    return g;
}

double TwoLinkArmModel::potential_energy(const Vector& q) const {
    const auto& p = params_;
    const double s1 = std::sin(q(0));
    const double s12 = std::sin(q(0) + q(1));
    return p.g0 * (p.m1 * p.lc1 * s1 + p.m2 * (p.l1 * s1 + p.lc2 * s12));
}

Vector TwoLinkArmModel::task_position(const Vector& q) const {
    return forward_kinematics(params_, q);
}

Matrix TwoLinkArmModel::task_jacobian(const Vector& q) const { return jacobian(params_, q); }

bool TwoLinkArmModel::task_point_reachable(const Vector& x) const {
    if (x.size() != 2) return false;
    const double r = x.norm();
    return r >= std::abs(params_.l1 - params_.l2) && r <= params_.l1 + params_.l2;
}

// ---------------------------------------------------------------------------

double kinetic_energy(const MechanicalModel& model, const JointState& s) {
    return 0.5 * s.v.dot(model.mass_matrix(s.q) * s.v);
}

double total_energy(const MechanicalModel& model, const JointState& s) {
    return kinetic_energy(model, s) + model.potential_energy(s.q);
}

Vector acceleration(const MechanicalModel& model, const JointState& s, const Vector& u,
                    const Vector& mu) {
    const int n = model.dof();
    if (s.q.size() != n || s.v.size() != n || u.size() != n || mu.size() != n) {
        throw std::invalid_argument("acceleration: dimension mismatch for model '" + model.name() + "'");
    }
    const Matrix m = model.mass_matrix(s.q);
    const Vector rhs = -model.coriolis_matrix(s.q, s.v) * s.v - model.damping() * s.v -
                       model.gravity_vector(s.q) + u + mu;
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("inertia matrix of model '" + model.name() +
                                 "' is not positive definite");
    }
    return llt.solve(rhs);
}

Vector acceleration(const MechanicalModel& model, const JointState& s, const Vector& u) {
    return acceleration(model, s, u, Vector::Zero(s.v.size()));
}

}  // namespace safepass
