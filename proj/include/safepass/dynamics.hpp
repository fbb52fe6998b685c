#pragma once

#include <string>

#include "safepass/types.hpp"

namespace safepass {

/// Rigid mechanical system  M(q) dv/dt + C(q,v) v + F v + g(q) = u + mu.
///
/// Implementations must keep M symmetric positive definite and C in the
/// Christoffel form so that v^T (dM/dt - 2C) v = 0. Models are immutable once
/// built; every evaluator is a pure function of its arguments.
///
/// Damping F is constant, symmetric and positive semi-definite; the
/// robustness results need it positive definite, which every arm model
/// enforces. Point masses may be undamped for analytic checks.
///
/// Task-space queries describe the point used by task-space constraints
/// (end effector for arms, the particle itself for a point mass).
class MechanicalModel {
public:
    virtual ~MechanicalModel() = default;

    virtual int dof() const = 0;
    virtual std::string name() const = 0;

    virtual Matrix mass_matrix(const Vector& q) const = 0;
    virtual Matrix coriolis_matrix(const Vector& q, const Vector& v) const = 0;
    virtual Vector gravity_vector(const Vector& q) const = 0;
    /// Potential U(q) with gravity_vector = dU/dq.
    virtual double potential_energy(const Vector& q) const = 0;

    virtual int task_dim() const = 0;
    virtual Vector task_position(const Vector& q) const = 0;
    virtual Matrix task_jacobian(const Vector& q) const = 0;
    /// Whether some configuration places the task point exactly at x.
    virtual bool task_point_reachable(const Vector& x) const = 0;

    const Matrix& damping() const { return damping_; }

protected:
    explicit MechanicalModel(Matrix damping);

private:
    Matrix damping_;
};

/// Particle of mass m in R^n under a uniform gravity field.
class PointMassModel final : public MechanicalModel {
public:
    /// gravity_accel is the field acceleration (m/s^2), e.g. (0, -9.81);
    /// the generalized gravity is then g(q) = -m * gravity_accel.
    PointMassModel(double mass, int dof, const Vector& damping_diag, const Vector& gravity_accel);
    /// Zero-gravity form with isotropic damping (zero allowed).
    PointMassModel(double mass, int dof, double damping = 0.0);

    int dof() const override { return dof_; }
    std::string name() const override { return "point_mass"; }
    Matrix mass_matrix(const Vector& q) const override;
    Matrix coriolis_matrix(const Vector& q, const Vector& v) const override;
    Vector gravity_vector(const Vector& q) const override;
    double potential_energy(const Vector& q) const override;

    int task_dim() const override { return dof_; }
    Vector task_position(const Vector& q) const override { return q; }
    Matrix task_jacobian(const Vector& q) const override;
    bool task_point_reachable(const Vector&) const override { return true; }

    double mass() const { return mass_; }
    const Vector& gravity_accel() const { return gravity_accel_; }

private:
    double mass_;
    int dof_;
    Vector gravity_accel_;
};

struct TwoLinkParams {
    double m1 = 1.0;
    double m2 = 1.0;
    double l1 = 0.5;
    double l2 = 0.5;
    double lc1 = 0.25;
    double lc2 = 0.25;
    double I1 = 1.0 * 0.5 * 0.5 / 12.0;
    double I2 = 1.0 * 0.5 * 0.5 / 12.0;
    double g0 = 9.81;
    Eigen::Vector2d damping{0.1, 0.1};

    void validate() const;
};

/// Planar two-link revolute arm. q = 0 points along +x, gravity acts along -y.
class TwoLinkArmModel final : public MechanicalModel {
public:
    TwoLinkArmModel();
    explicit TwoLinkArmModel(const TwoLinkParams& params);

    int dof() const override { return 2; }
    std::string name() const override { return "two_link"; }
    Matrix mass_matrix(const Vector& q) const override;
    Matrix coriolis_matrix(const Vector& q, const Vector& v) const override;
    Vector gravity_vector(const Vector& q) const override;
    double potential_energy(const Vector& q) const override;

    int task_dim() const override { return 2; }
    Vector task_position(const Vector& q) const override;
    Matrix task_jacobian(const Vector& q) const override;
    bool task_point_reachable(const Vector& x) const override;

    const TwoLinkParams& params() const { return params_; }

private:
    TwoLinkParams params_;
};

double kinetic_energy(const MechanicalModel& model, const JointState& s);

/// Kinetic plus potential energy.
double total_energy(const MechanicalModel& model, const JointState& s);

/// dv/dt = M^{-1}(-C v - F v - g + u + mu). Throws std::runtime_error if the
/// Cholesky factorization of M fails, which only happens for a broken model.
Vector acceleration(const MechanicalModel& model, const JointState& s, const Vector& u,
                    const Vector& mu);
Vector acceleration(const MechanicalModel& model, const JointState& s, const Vector& u);

}  // namespace safepass
