#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safepass/constraints.hpp"
#include "safepass/simulate.hpp"

namespace safepass {

enum class CheckStatus { Pass, Fail, PreconditionUnmet };

std::string to_string(CheckStatus status);

/// Outcome of one property check.
///
/// worst_margin is signed so that positive means the property holds with room
/// to spare; the check fails exactly when worst_margin < -tolerance. Vacuous
/// passes report +inf.
struct CheckReport {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    double worst_margin = 0.0;
    std::size_t worst_index = 0;
    double worst_time = 0.0;
    double tolerance = 0.0;
    std::string detail;

    bool passed() const { return status == CheckStatus::Pass; }
    bool failed() const { return status == CheckStatus::Fail; }
};

// Trajectory checks read recorded data only; none of them re-simulates.

/// Once the state is in C and no disturbance acts, h must stay >= -tol.
/// Records with mu != 0 disarm the check; it re-arms at the next undisturbed
/// record with h >= 0. Precondition: h(0) >= 0.
CheckReport check_forward_invariance(const Trajectory& traj, double tol);

/// Every record with h >= 0 satisfies |v|^2 <= v_bar + tol.
CheckReport check_velocity_bound(const Trajectory& traj, double v_bar, double tol);

/// On every maximal run of records with h <= 0 starting at t1, and for every
/// t2 in it, S(t2) - S(t1) <= int_{t1}^{t2} v^T mu dt + tol, with the
/// integral by the trapezoidal rule on the record grid.
CheckReport check_passivity(const Trajectory& traj, double tol);

/// After the last disturbance ends (t_off), max(0, -h) <= tol for every
/// record at or after t_off + window.
///
/// If the state is still outside C and at rest (|v| <= rest_speed) over that
/// tail, it sits at an equilibrium where u = g, i.e. grad c = 0; the result
/// is PreconditionUnmet rather than Fail. A trajectory released inside C, or
/// never disturbed and starting in C, passes vacuously.
CheckReport check_asymptotic_return(const Trajectory& traj, double window, double tol,
                                    double rest_speed);

/// Every record flagged in C_eps has u == u_nom exactly.
CheckReport check_nominal_passthrough(const Trajectory& traj);

struct TrajectoryCheckOptions {
    double invariance_tol = 5e-4;
    std::optional<double> v_bar;
    double velocity_tol = 1e-9;
    double passivity_tol = 1e-3;
    double return_window = 5.0;
    double return_tol = 1e-3;
    double rest_speed = 1e-6;
};

std::vector<CheckReport> run_trajectory_checks(const Trajectory& traj,
                                               const TrajectoryCheckOptions& opts);

struct StructuralCheckOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    double joint_range = 3.141592653589793;  ///< q sampled in [-range, range]^n
    double speed_range = 2.0;                ///< v sampled in [-range, range]^n
    double skew_tol = 1e-6;                  ///< relative to 1 + |v|^2
    double fd_tol = 1e-6;
    double fd_step = 1e-6;
};

/// Structural sweeps: M symmetric and positive definite, skew-symmetry of
/// dM/dt - 2C (dM/dt by central differences along v), gravity = dU/dq, task
/// Jacobian and (if given) grad c against central finite differences.
std::vector<CheckReport> check_structural(const MechanicalModel& model,
                                          const StructuralCheckOptions& opts,
                                          const EllipsoidSpec* spec = nullptr);

/// Human-readable table followed by one "check.<name>.<field>=value" line per
/// field.
std::string format_reports(const std::vector<CheckReport>& reports);

bool any_failed(const std::vector<CheckReport>& reports);

}  // namespace safepass
