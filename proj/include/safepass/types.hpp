#pragma once

#include <Eigen/Dense>

namespace safepass {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Generalized position/velocity pair of a mechanical system.
struct JointState {
    Vector q;
    Vector v;

    int dof() const { return static_cast<int>(q.size()); }

    /// Throws std::invalid_argument unless q and v are finite and of equal
    /// length n >= 1.
    void validate() const;
};

bool all_finite(const Vector& x);

}  // namespace safepass
