#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "safepass/barrier.hpp"

using namespace safepass;

namespace {

EllipsoidSpec default_task_spec() {
    EllipsoidSpec spec;
    spec.center = Vector{{0.43, -0.12}};
    spec.shape = Vector{{1.78, 4.95}}.asDiagonal();
    return spec;
}

}  // namespace

TEST_CASE("h at rest is k_h c and kinetic energy lowers it") {
    const TwoLinkArmModel arm;
    const EllipsoidSpec spec = default_task_spec();
    const BarrierConfig cfg;
    const Vector q{{-0.6, 0.6}};
    const double c = c_value(spec, arm, q);
    CHECK(h_value(arm, spec, cfg, JointState{q, Vector::Zero(2)}) == doctest::Approx(0.25 * c));
    const Vector v{{0.3, -0.2}};
    const double ke = 0.5 * v.dot(arm.mass_matrix(q) * v);
    CHECK(h_value(arm, spec, cfg, JointState{q, v}) == doctest::Approx(0.25 * c - ke));
}

TEST_CASE("blend curves") {
    const double eps = 0.1;
    CHECK(kappa_cubic(0.0, eps) == 0.0);
    CHECK(kappa_cubic(eps, eps) == 1.0);
    CHECK(kappa_cubic(eps / 2.0, eps) == doctest::Approx(0.5));
    CHECK(kappa_cubic(0.025, eps) == doctest::Approx(-2.0 * 0.25 * 0.25 * 0.25 + 3.0 * 0.25 * 0.25));
    CHECK(kappa_linear(0.025, eps) == doctest::Approx(0.25));
    // Flat ends of the cubic.
    const double d = 1e-6;
    CHECK((kappa_cubic(d, eps) - kappa_cubic(0.0, eps)) / d < 1e-3);
    CHECK((kappa_cubic(eps, eps) - kappa_cubic(eps - d, eps)) / d < 1e-3);
    double previous = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double k = kappa(BlendCurve::Cubic, eps * i / 100.0, eps);
        CHECK(k >= previous);
        previous = k;
    }
}

TEST_CASE("phi is zero outside C and one inside C_eps") {
    BarrierConfig cfg;
    CHECK(phi_eps(-0.3, cfg) == 0.0);
    CHECK(phi_eps(0.0, cfg) == 0.0);
    CHECK(phi_eps(0.1, cfg) == 1.0);
    CHECK(phi_eps(5.0, cfg) == 1.0);
    CHECK(phi_eps(0.05, cfg) == doctest::Approx(0.5));
    cfg.kappa = BlendCurve::Linear;
    CHECK(phi_eps(0.02, cfg) == doctest::Approx(0.2));
    CHECK(in_safe_set(0.0));
    CHECK_FALSE(in_safe_set(-1e-12));
    CHECK(in_c_eps(0.1, cfg));
    CHECK_FALSE(in_c_eps(0.0999, cfg));
}

TEST_CASE("barrier config validation") {
    BarrierConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilon = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = BarrierConfig{};
    cfg.k_h = -1.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("hdot_exact equals the time derivative of h along the flow") {
    const TwoLinkArmModel arm;
    const EllipsoidSpec spec = default_task_spec();
    const BarrierConfig cfg;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double dt = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const JointState s{Vector{{3.0 * uni(rng), 3.0 * uni(rng)}}, Vector{{2.0 * uni(rng), 2.0 * uni(rng)}}};
        const Vector u{{5.0 * uni(rng), 5.0 * uni(rng)}};
        const Vector mu{{uni(rng), uni(rng)}};
        const Vector a = acceleration(arm, s, u, mu);
        // Directional derivative of h along (v, a), centred.
        const JointState fwd{s.q + dt * s.v, s.v + dt * a};
        const JointState bwd{s.q - dt * s.v, s.v - dt * a};
        const double fd = (h_value(arm, spec, cfg, fwd) - h_value(arm, spec, cfg, bwd)) / (2.0 * dt);
        CHECK(hdot_exact(arm, spec, cfg, s, u, mu) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("lower bound drops only the dissipation term") {
    const TwoLinkArmModel arm;
    const EllipsoidSpec spec = default_task_spec();
    const BarrierConfig cfg;
    const JointState s{Vector{{0.2, 0.9}}, Vector{{-0.7, 0.4}}};
    const Vector u{{1.0, -2.0}};
    const double exact = hdot_exact(arm, spec, cfg, s, u);
    const double bound = hdot_lower_bound(arm, spec, cfg, s, u);
    CHECK(bound <= exact);
    CHECK(exact - bound == doctest::Approx(s.v.dot(arm.damping() * s.v)));
}

TEST_CASE("evaluate_barrier bundles consistent terms") {
    const TwoLinkArmModel arm;
    const EllipsoidSpec spec = default_task_spec();
    const BarrierConfig cfg;
    const JointState s{Vector{{0.2, 0.9}}, Vector{{-0.7, 0.4}}};
    const BarrierTerms t = evaluate_barrier(arm, spec, cfg, s);
    CHECK(t.c == c_value(spec, arm, s.q));
    CHECK(t.h == doctest::Approx(h_value(arm, spec, cfg, s)));
    CHECK(t.gravity.isApprox(arm.gravity_vector(s.q)));
    CHECK(t.restoring_torque(cfg).isApprox(t.gravity + 0.25 * t.grad_c));
}
