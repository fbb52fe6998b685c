#include "safepass/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace safepass {

void EllipsoidSpec::validate(const MechanicalModel& model) const {
    const Eigen::Index dim = space == ConstraintSpace::Joint ? model.dof() : model.task_dim();
    if (center.size() != dim || shape.rows() != dim || shape.cols() != dim) {
        throw std::invalid_argument("ellipsoid dimension does not match the model's " +
                                    std::string(space == ConstraintSpace::Joint ? "joint" : "task") +
                                    " space");
    }
    if (!center.allFinite() || !shape.allFinite()) {
        throw std::invalid_argument("ellipsoid parameters must be finite");
    }
    if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        throw std::invalid_argument("ellipsoid shape matrix must be symmetric");
    }
    Eigen::LLT<Matrix> llt(shape);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("ellipsoid shape matrix must be positive definite");
    }
}

namespace {

Vector constrained_point(const EllipsoidSpec& spec, const MechanicalModel& model, const Vector& q) {
    return spec.space == ConstraintSpace::Joint ? q : model.task_position(q);
}

}  // namespace

double c_value(const EllipsoidSpec& spec, const MechanicalModel& model, const Vector& q) {
    const Vector d = constrained_point(spec, model, q) - spec.center;
    return 1.0 - d.dot(spec.shape * d);
}

Vector grad_c(const EllipsoidSpec& spec, const MechanicalModel& model, const Vector& q) {
    if (spec.space == ConstraintSpace::Joint) {
        return -2.0 * (spec.shape * (q - spec.center));
    }
    const Vector d = model.task_position(q) - spec.center;
    return -2.0 * (model.task_jacobian(q).transpose() * (spec.shape * d));
}

// ---------------------------------------------------------------------------

JointBoxSampler::JointBoxSampler(Vector lower, Vector upper, std::size_t count,
                                 std::uint64_t seed, Scheme scheme)
    : lower_(std::move(lower)),
      upper_(std::move(upper)),
      count_(count),
      seed_(seed),
      scheme_(scheme) {
    if (lower_.size() < 1 || lower_.size() != upper_.size()) {
        throw std::invalid_argument("sampler box bounds must have equal, non-zero length");
    }
    if (!lower_.allFinite() || !upper_.allFinite() || (upper_.array() < lower_.array()).any()) {
        throw std::invalid_argument("sampler box must be finite with lower <= upper");
    }
    if (count_ == 0) {
        throw std::invalid_argument("sampler count must be positive");
    }
}

std::vector<Vector> JointBoxSampler::samples() const {
    const auto n = lower_.size();
    const Vector span = upper_ - lower_;
    std::vector<Vector> out;
    if (scheme_ == Scheme::Uniform) {
        std::mt19937_64 rng(seed_);
        out.reserve(count_);
        for (std::size_t i = 0; i < count_; ++i) {
            Vector q(n);
            for (Eigen::Index j = 0; j < n; ++j) {
                const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                q(j) = lower_(j) + unit * span(j);
            }
            out.push_back(std::move(q));
        }
        return out;
    }

    auto per_axis = static_cast<std::size_t>(
        std::ceil(std::pow(static_cast<double>(count_), 1.0 / static_cast<double>(n)) - 1e-9));
    per_axis = std::max<std::size_t>(per_axis, 2);
    std::size_t total = 1;
    for (Eigen::Index j = 0; j < n; ++j) total *= per_axis;
    out.reserve(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t k = 0; k < total; ++k) {
        Vector q(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double frac =
                static_cast<double>(idx[static_cast<std::size_t>(j)]) / static_cast<double>(per_axis - 1);
            q(j) = lower_(j) + frac * span(j);
        }
        out.push_back(std::move(q));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (++idx[j] < per_axis) break;
            idx[j] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

Vector clamp_to_box(const Vector& q, const JointBoxSampler& box) {
    return q.cwiseMax(box.lower()).cwiseMin(box.upper());
}

// Projected gradient ascent with backtracking; monotone in c.
double polish_maximum(const EllipsoidSpec& spec, const MechanicalModel& model,
                      const JointBoxSampler& box, Vector q) {
    double best = c_value(spec, model, q);
    double step = 0.1;
    for (int iter = 0; iter < 500 && step > 1e-14; ++iter) {
        const Vector g = grad_c(spec, model, q);
        if (g.norm() < 1e-14) break;
        bool improved = false;
        while (step > 1e-14) {
            const Vector trial = clamp_to_box(q + step * g, box);
            const double c_trial = c_value(spec, model, trial);
            if (c_trial > best) {
                q = trial;
                best = c_trial;
                step *= 2.0;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return best;
}

}  // namespace

double estimate_cbar(const EllipsoidSpec& spec, const MechanicalModel& model,
                     const JointBoxSampler& sampler) {
    double best = -std::numeric_limits<double>::infinity();
    Vector best_q;
    bool any_inside = false;
    for (const Vector& q : sampler.samples()) {
        const double c = c_value(spec, model, q);
        if (c >= 0.0) any_inside = true;
        if (c > best) {
            best = c;
            best_q = q;
        }
    }
    if (!any_inside) {
        throw std::runtime_error("no sampled configuration lies in the constraint set Q");
    }
    const bool centre_attainable =
        spec.space == ConstraintSpace::Joint || model.task_point_reachable(spec.center);
    if (centre_attainable) {
        return 1.0;
    }
    return std::min(1.0, std::max(best, polish_maximum(spec, model, sampler, best_q)));
}

double estimate_mu1(const MechanicalModel& model, const JointBoxSampler& sampler) {
    double lowest = std::numeric_limits<double>::infinity();
    double highest = -lowest;
    for (const Vector& q : sampler.samples()) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(model.mass_matrix(q), Eigen::EigenvaluesOnly);
        const double lam = eig.eigenvalues().minCoeff();
        lowest = std::min(lowest, lam);
        highest = std::max(highest, lam);
    }
    // Configuration-independent inertia: the sampled value is exact.
    if (highest == lowest) return lowest;
    return (1.0 - kInertiaBoundMargin) * lowest;
}

double max_kh(double mu1, double v_bar, double c_bar) {
    if (!(mu1 > 0.0) || !(v_bar > 0.0) || !(c_bar > 0.0)) {
        throw std::invalid_argument("max_kh requires positive mu1, v_bar and c_bar");
    }
    return mu1 * v_bar / (2.0 * c_bar);
}

GradientSurvey survey_grad_c_outside(const EllipsoidSpec& spec, const MechanicalModel& model,
                                     const JointBoxSampler& sampler) {
    GradientSurvey out;
    for (const Vector& q : sampler.samples()) {
        if (c_value(spec, model, q) >= 0.0) continue;
        ++out.outside;
        const double norm = grad_c(spec, model, q).norm();
        if (norm < out.min_norm) {
            out.min_norm = norm;
            out.argmin = q;
        }
    }
    return out;
}

GainCalibration calibrate_gain(const EllipsoidSpec& spec, const MechanicalModel& model,
                               double kh, double v_bar, const JointBoxSampler& sampler) {
    GainCalibration cal;
    cal.kh = kh;
    cal.v_bar = v_bar;
    cal.mu1 = estimate_mu1(model, sampler);
    cal.cbar = estimate_cbar(spec, model, sampler);
    cal.kh_max = max_kh(cal.mu1, v_bar, cal.cbar);
    return cal;
}

}  // namespace safepass
