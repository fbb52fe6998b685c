#include "safepass/kinematics.hpp"

#include <cmath>

namespace safepass {

Eigen::Vector2d forward_kinematics(const TwoLinkParams& p, const Vector& q) {
    const double q12 = q(0) + q(1);
    return {p.l1 * std::cos(q(0)) + p.l2 * std::cos(q12),
            p.l1 * std::sin(q(0)) + p.l2 * std::sin(q12)};
}

Eigen::Matrix2d jacobian(const TwoLinkParams& p, const Vector& q) {
    const double q12 = q(0) + q(1);
    const double s1 = std::sin(q(0));
    const double c1 = std::cos(q(0));
    const double s12 = std::sin(q12);
    const double c12 = std::cos(q12);
    Eigen::Matrix2d j;
    j << -p.l1 * s1 - p.l2 * s12, -p.l2 * s12,
          p.l1 * c1 + p.l2 * c12,  p.l2 * c12;
    return j;
}

}  // namespace safepass
