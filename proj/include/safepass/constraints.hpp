#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "safepass/dynamics.hpp"

namespace safepass {

enum class ConstraintSpace { Joint, Task };

/// Ellipsoidal position constraint c(q) = 1 - (p - x0)^T P (p - x0), where
/// p = q in joint space or p = f(q) (task point) in task space. The
/// constraint set Q is {q : c(q) >= 0}.
struct EllipsoidSpec {
    Vector center;
    Matrix shape;
    ConstraintSpace space = ConstraintSpace::Task;

    /// Checks P symmetric positive definite and that the dimensions agree
    /// with the model's joint or task space.
    void validate(const MechanicalModel& model) const;
};

double c_value(const EllipsoidSpec& spec, const MechanicalModel& model, const Vector& q);

/// Task space: -2 J(q)^T P (f(q) - x0). Joint space: -2 P (q - x0).
Vector grad_c(const EllipsoidSpec& spec, const MechanicalModel& model, const Vector& q);

/// Deterministic seeded sampler over an axis-aligned joint box.
///
/// Uniform draws come from a 64-bit Mersenne twister mapped to [0, 1) with
/// 53 bits, so a (box, count, seed) triple yields the same points on every
/// platform. The grid scheme places ceil(count^(1/n)) points per axis,
/// endpoints included.
class JointBoxSampler {
public:
    enum class Scheme { Uniform, Grid };

    JointBoxSampler(Vector lower, Vector upper, std::size_t count, std::uint64_t seed,
                    Scheme scheme = Scheme::Uniform);

    std::vector<Vector> samples() const;

    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }
    std::size_t count() const { return count_; }
    std::uint64_t seed() const { return seed_; }
    Scheme scheme() const { return scheme_; }

private:
    Vector lower_;
    Vector upper_;
    std::size_t count_;
    std::uint64_t seed_;
    Scheme scheme_;
};

/// Upper estimate of max_{q in Q} c(q).
///
/// Ellipsoidal c never exceeds 1, and equals 1 wherever p = x0, so joint-space
/// specs and task-space specs with a reachable centre return exactly 1. For an
/// unreachable centre the sampled maximum is refined by projected gradient
/// ascent inside the box; the result is never below the best sample.
/// Throws std::runtime_error when no sample lies in Q.
double estimate_cbar(const EllipsoidSpec& spec, const MechanicalModel& model,
                     const JointBoxSampler& sampler);

inline constexpr double kInertiaBoundMargin = 0.05;

/// (1 - 5%) times the smallest sampled eigenvalue of M(q); the exact value
/// when M is the same at every sample.
double estimate_mu1(const MechanicalModel& model, const JointBoxSampler& sampler);

/// Largest gain keeping the safe set inside Q x V: mu1 * v_bar / (2 c_bar).
double max_kh(double mu1, double v_bar, double c_bar);

/// Smallest |grad c| among sampled configurations outside Q. Stationary points
/// of c outside Q stall the restoring torque; the survey only covers the
/// samples and proves nothing between them.
struct GradientSurvey {
    std::size_t outside = 0;
    double min_norm = std::numeric_limits<double>::infinity();
    Vector argmin;
};

GradientSurvey survey_grad_c_outside(const EllipsoidSpec& spec, const MechanicalModel& model,
                                     const JointBoxSampler& sampler);

struct GainCalibration {
    double mu1 = 0.0;
    double cbar = 0.0;
    double kh_max = 0.0;
    double kh = 0.0;
    double v_bar = 0.0;

    bool admissible() const { return kh > 0.0 && kh <= kh_max; }
};

GainCalibration calibrate_gain(const EllipsoidSpec& spec, const MechanicalModel& model,
                               double kh, double v_bar, const JointBoxSampler& sampler);

}  // namespace safepass
