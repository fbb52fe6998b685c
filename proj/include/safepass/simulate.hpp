#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "safepass/controller.hpp"

namespace safepass {

/// Constant torque mu applied on the half-open interval [start, end).
struct DisturbanceWindow {
    double start = 0.0;
    double end = 0.0;
    Vector torque;
};

class DisturbanceProfile {
public:
    DisturbanceProfile() = default;
    explicit DisturbanceProfile(std::vector<DisturbanceWindow> windows);

    /// Zero outside every window.
    Vector at(double t, int n) const;
    /// Throws std::invalid_argument unless windows are ordered, disjoint,
    /// finite and sized n.
    void validate(int n) const;

    const std::vector<DisturbanceWindow>& windows() const { return windows_; }
    bool empty() const { return windows_.empty(); }

private:
    std::vector<DisturbanceWindow> windows_;
};

enum class ControlMode {
    Safe,        ///< blended safety controller
    Nominal,     ///< raw u_nom, no filtering
    BaselineQp,  ///< zeroing-barrier QP projection of u_nom
};

struct Scenario {
    std::string name = "scenario";
    std::shared_ptr<const MechanicalModel> model;
    EllipsoidSpec constraint;
    BarrierConfig barrier;
    NominalController nominal = GravityCompensation{};
    ControlMode mode = ControlMode::Safe;
    double baseline_alpha_gain = 1.0;
    DisturbanceProfile disturbance;
    JointState initial;
    double dt = 1e-3;
    double duration = 1.0;
    std::uint64_t seed = 0;
    /// Evaluate the controller once per step instead of at every RK4 stage.
    bool zero_order_hold = false;
    /// Identifies the configuration the trajectory came from; set by the
    /// scenario loader.
    std::uint64_t digest = 0;

    void validate() const;
    std::size_t step_count() const;
};

struct SimRecord {
    double t = 0.0;
    Vector q;
    Vector v;
    Vector x;
    double c = 0.0;
    double h = 0.0;
    double phi = 0.0;
    Vector u;
    Vector u_nom;
    Vector mu;
    double storage = 0.0;  ///< S = -h
    double hdot = 0.0;     ///< dh/dt under the recorded u and mu
    bool in_c = false;
    bool in_c_eps = false;
    bool baseline_infeasible = false;  ///< not exported to CSV
};

struct TrajectorySummary {
    double min_h = 0.0;
    double min_c = 0.0;
    double max_v_sq = 0.0;
    double fraction_in_c_eps = 0.0;
    double peak_u_norm = 0.0;
    std::size_t baseline_infeasible_count = 0;
};

struct Trajectory {
    std::vector<SimRecord> records;
    std::uint64_t scenario_digest = 0;

    int dof() const { return records.empty() ? 0 : static_cast<int>(records.front().q.size()); }
    int task_dim() const { return records.empty() ? 0 : static_cast<int>(records.front().x.size()); }
    TrajectorySummary summary() const;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double t, const std::string& what)
        : std::runtime_error(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

inline constexpr double kDivergenceLimit = 1e6;

using ControlLaw = std::function<Vector(const JointState&, double)>;

/// Classical RK4 on (q, v) with the control law and disturbance re-evaluated
/// at every stage time. Throws DivergenceError if any state entry leaves
/// [-1e6, 1e6] or becomes non-finite.
JointState rk4_step(const MechanicalModel& model, const ControlLaw& control,
                    const DisturbanceProfile& profile, const JointState& s, double t, double dt);

/// Fixed-step closed loop of the scenario. Records are emitted on the grid
/// t_k = k dt, k = 0..round(duration / dt); the result depends only on the
/// scenario.
Trajectory simulate(const Scenario& scn);

}  // namespace safepass
