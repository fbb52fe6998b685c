#include <doctest.h>

#include <cmath>
#include <limits>

#include "safepass/verify.hpp"
#include "test_support.hpp"

using namespace safepass;

namespace {

SimRecord record(double t, double h, double v, double mu = 0.0, double eps = 0.1) {
    SimRecord r;
    r.t = t;
    r.q = r.x = Vector::Zero(1);
    r.v = Vector::Constant(1, v);
    r.u = r.u_nom = Vector::Constant(1, 9.81);
    r.mu = Vector::Constant(1, mu);
    r.c = 1.0;
    r.h = h;
    r.storage = -h;
    r.phi = h >= eps ? 1.0 : 0.0;
    r.in_c = h >= 0.0;
    r.in_c_eps = h >= eps;
    return r;
}

Trajectory constant(double h, std::size_t count = 10) {
    Trajectory traj;
    for (std::size_t k = 0; k < count; ++k) traj.records.push_back(record(0.1 * k, h, 0.0));
    return traj;
}

// Undamped segment outside C with mu = 0 and storage following a prescribed path.
Trajectory storage_path(std::initializer_list<double> storage) {
    Trajectory traj;
    double t = 0.0;
    for (double s : storage) {
        traj.records.push_back(record(t, -s, 0.1));
        t += 0.01;
    }
    return traj;
}

class FlippedCoriolis final : public MechanicalModel {
public:
    FlippedCoriolis() : MechanicalModel(Matrix::Identity(2, 2) * 0.1) {}
    int dof() const override { return 2; }
    std::string name() const override { return "two_link_flipped_C"; }
    Matrix mass_matrix(const Vector& q) const override { return arm_.mass_matrix(q); }
    Matrix coriolis_matrix(const Vector& q, const Vector& v) const override {
        return -arm_.coriolis_matrix(q, v);
    }
    Vector gravity_vector(const Vector& q) const override { return arm_.gravity_vector(q); }
    double potential_energy(const Vector& q) const override { return arm_.potential_energy(q); }
    int task_dim() const override { return 2; }
    Vector task_position(const Vector& q) const override { return arm_.task_position(q); }
    Matrix task_jacobian(const Vector& q) const override { return arm_.task_jacobian(q); }
    bool task_point_reachable(const Vector& x) const override { return arm_.task_point_reachable(x); }

private:
    TwoLinkArmModel arm_;
};

}  // namespace

TEST_CASE("forward invariance on a constant safe state") {
    const auto r = check_forward_invariance(constant(0.25), 5e-4);
    CHECK(r.passed());
    CHECK(r.worst_margin == 0.25);
    CHECK(r.tolerance == 5e-4);
}

TEST_CASE("forward invariance fails when h drops below -tol") {
    Trajectory traj = constant(0.2);
    traj.records[4].h = -0.01;
    const auto r = check_forward_invariance(traj, 5e-4);
    CHECK(r.failed());
    CHECK(r.worst_index == 4);
    CHECK(r.worst_time == doctest::Approx(0.4));
    traj.records[4].h = -4e-4;
    CHECK(check_forward_invariance(traj, 5e-4).passed());
}

TEST_CASE("forward invariance precondition and disturbance handling") {
    CHECK(check_forward_invariance(constant(-0.1), 5e-4).status == CheckStatus::PreconditionUnmet);
    Trajectory traj = constant(0.2, 6);
    traj.records[2] = record(0.2, -0.3, 0.0, 1.0);
    traj.records[3] = record(0.3, -0.2, 0.0, 0.0);
    traj.records[4] = record(0.4, 0.05, 0.0, 0.0);
    // Pushed out, drifting back outside C: not counted until h >= 0 again.
    const auto r = check_forward_invariance(traj, 5e-4);
    CHECK(r.passed());
    CHECK(r.worst_margin == 0.05);
}

TEST_CASE("velocity bound") {
    Trajectory traj;
    traj.records.push_back(record(0.0, 0.1, 0.0));
    CHECK(check_velocity_bound(traj, 1.0, 1e-9).passed());
    traj.records.push_back(record(0.1, 0.1, std::sqrt(2.0)));
    const auto r = check_velocity_bound(traj, 1.0, 1e-9);
    CHECK(r.failed());
    CHECK(r.worst_margin == doctest::Approx(-1.0));
    traj.records.back().h = -0.1;
    CHECK(check_velocity_bound(traj, 1.0, 1e-9).passed());
}

TEST_CASE("passivity") {
    SUBCASE("undisturbed storage decreasing outside C") {
        CHECK(check_passivity(storage_path({0.3, 0.25, 0.2, 0.2, 0.1}), 1e-3).passed());
    }
    SUBCASE("storage increasing without supply") {
        const auto r = check_passivity(storage_path({0.1, 0.2, 0.3}), 1e-3);
        CHECK(r.failed());
        CHECK(r.worst_margin == doctest::Approx(-0.2));
    }
    SUBCASE("storage increase paid for by the supplied energy") {
        Trajectory traj = storage_path({0.1, 0.1 + 0.5 * 0.01 * 2.0 * 0.1});
        traj.records[0].mu = traj.records[1].mu = Vector::Constant(1, 2.0);
        CHECK(check_passivity(traj, 1e-12).passed());
    }
    SUBCASE("all inside C is vacuous") {
        const auto r = check_passivity(constant(0.3), 1e-3);
        CHECK(r.passed());
        CHECK(r.worst_margin == std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("asymptotic return") {
    SUBCASE("already in C") {
        const auto r = check_asymptotic_return(constant(0.2, 100), 5.0, 1e-3, 1e-6);
        CHECK(r.passed());
    }
    SUBCASE("rest outside C where grad c vanishes") {
        Trajectory traj;
        for (int k = 0; k <= 100; ++k) traj.records.push_back(record(0.1 * k, -0.2, 0.0, k < 5 ? 1.0 : 0.0));
        const auto r = check_asymptotic_return(traj, 5.0, 1e-3, 1e-6);
        CHECK(r.status == CheckStatus::PreconditionUnmet);
    }
    SUBCASE("recovers within the window") {
        Trajectory traj;
        for (int k = 0; k <= 100; ++k) {
            const double t = 0.1 * k;
            traj.records.push_back(record(t, t < 3.0 ? -0.2 : 0.01, 0.1, k < 5 ? 1.0 : 0.0));
        }
        CHECK(check_asymptotic_return(traj, 5.0, 1e-3, 1e-6).passed());
    }
    SUBCASE("moving but still outside after the window") {
        Trajectory traj;
        for (int k = 0; k <= 100; ++k) traj.records.push_back(record(0.1 * k, -0.2, 0.1, k < 5 ? 1.0 : 0.0));
        CHECK(check_asymptotic_return(traj, 5.0, 1e-3, 1e-6).failed());
    }
    SUBCASE("too short to judge") {
        Trajectory traj;
        for (int k = 0; k <= 20; ++k) traj.records.push_back(record(0.1 * k, -0.2, 0.1, k < 5 ? 1.0 : 0.0));
        CHECK(check_asymptotic_return(traj, 5.0, 1e-3, 1e-6).status == CheckStatus::PreconditionUnmet);
    }
}

TEST_CASE("nominal passthrough") {
    Trajectory traj = constant(0.2);
    CHECK(check_nominal_passthrough(traj).passed());
    traj.records[3].u(0) += 1e-15 * 9.81;
    CHECK(check_nominal_passthrough(traj).failed());
    // Records with h = eps/2 are outside C_eps and excluded.
    traj.records[3] = record(0.3, 0.05, 0.0);
    traj.records[3].u(0) = 0.0;
    CHECK(check_nominal_passthrough(traj).passed());
}

TEST_CASE("trajectory checks on shipped scenarios") {
    const auto safe_file = shipped("tracking_violation");
    const auto reports = run_trajectory_checks(simulate(safe_file.scenario), safe_file.tolerances);
    CHECK_FALSE(any_failed(reports));

    const auto raw_file = shipped("tracking_raw_nominal");
    const auto raw = check_forward_invariance(simulate(raw_file.scenario), 5e-4);
    CHECK(raw.failed());
    CHECK(raw.worst_margin < -0.1);
}

TEST_CASE("structural sweeps") {
    EllipsoidSpec spec;
    spec.center = Vector{{0.43, -0.12}};
    spec.shape = Vector{{1.78, 4.95}}.asDiagonal();
    const TwoLinkArmModel arm;
    const auto reports = check_structural(arm, StructuralCheckOptions{}, &spec);
    CHECK(reports.size() == 6);
    for (const auto& r : reports) {
        CAPTURE(r.name);
        CHECK(r.passed());
    }
    const PointMassModel pm(1.0, 3);
    CHECK_FALSE(any_failed(check_structural(pm, StructuralCheckOptions{})));

    const FlippedCoriolis broken;
    const auto mutated = check_structural(broken, StructuralCheckOptions{});
    for (const auto& r : mutated) {
        CAPTURE(r.name);
        CHECK(r.failed() == (r.name == "skew_symmetry"));
    }
}

TEST_CASE("report formatting") {
    const auto text = format_reports({check_forward_invariance(constant(0.25), 5e-4)});
    CHECK(text.find("check.forward_invariance.status=pass") != std::string::npos);
    CHECK(text.find("check.forward_invariance.worst_margin=0.25") != std::string::npos);
    CHECK(text.find("check.forward_invariance.tolerance=0.00050000000000000001") != std::string::npos);
}
