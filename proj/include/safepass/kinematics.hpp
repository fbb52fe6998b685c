#pragma once

#include "safepass/dynamics.hpp"

namespace safepass {

// Planar two-link kinematics. Nothing here inverts the Jacobian, so the folded
// and stretched configurations (q2 = pi, q2 = 0) are ordinary inputs.

Eigen::Vector2d forward_kinematics(const TwoLinkParams& p, const Vector& q);
Eigen::Matrix2d jacobian(const TwoLinkParams& p, const Vector& q);

inline Eigen::Vector2d forward_kinematics(const TwoLinkArmModel& model, const Vector& q) {
    return forward_kinematics(model.params(), q);
}
inline Eigen::Matrix2d jacobian(const TwoLinkArmModel& model, const Vector& q) {
    return jacobian(model.params(), q);
}

}  // namespace safepass
