#include "flexlink/errors.hpp"
#include "flexlink/simulator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace flexlink;

namespace {

BeamParams paper_like_beam() {
    BeamParams b;
    b.length = 1.0;
    b.area = 1.146497e-4;
    b.density = 7850.0;
    b.flexural_rigidity = 34.3612;
    b.joint_inertia = 1.3254e-6;
    b.gravity = 9.81;
    b.mode_count = 2;
    return b;
}

SimConfig paper_scenario(double duration = 20.0) {
    SimConfig cfg;
    cfg.beam = paper_like_beam();
    cfg.kp_diag = Eigen::Vector3d(160.0, 100.0, 100.0);
    cfg.kv_diag = Eigen::Vector3d(30.0, 1.0, 0.5);
    cfg.desired_force = 5.0;
    cfg.force_gain = 3.0;
    cfg.step = 1e-4;
    cfg.duration = duration;
    cfg.rise_time = 0.0;
    cfg.theta0 = 0.0;
    cfg.target = Vec2(0.70710678, 0.70710678);
    cfg.log_decimation = 1;

    const Vec2 n = Vec2(-1.0, -1.0).normalized();
    Environment env = Environment::isotropic(Vec2::Zero(), n, 86.9);
    env.contact_point = cfg.target + (cfg.desired_force / 86.9) * n;
    cfg.environment = env;
    return cfg;
}

} // namespace

TEST_CASE("free rigid rotation advances theta linearly") {
    BeamParams beam = paper_like_beam();
    beam.gravity = 0.0;
    const ModalBasis basis(beam);

    PlantState s = PlantState::zero(2);
    s.theta_dot() = 0.7;
    const double h = 1e-3;
    auto no_control = [](const PlantState&) { return Eigen::VectorXd::Zero(3); };
    for (int i = 0; i < 100; ++i) s = rk4_step(s, h, basis, no_control, nullptr);

    CHECK(s.theta() == doctest::Approx(0.7 * 0.1).epsilon(1e-12));
    CHECK(s.theta_dot() == doctest::Approx(0.7).epsilon(1e-12));
    for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(s.q(j)) < 1e-12);
        CHECK(std::abs(s.q_dot(j)) < 1e-12);
    }
}

TEST_CASE("unforced zero-gravity dynamics conserve energy") {
    BeamParams beam = paper_like_beam();
    beam.gravity = 0.0;
    const ModalBasis basis(beam);

    PlantState s = PlantState::zero(2);
    s.theta() = 0.3;
    s.theta_dot() = 0.5;
    s.q(0) = 0.02;
    s.q(1) = 0.005;
    const double e0 = total_energy(s, basis).total();

    auto no_control = [](const PlantState&) { return Eigen::VectorXd::Zero(3); };
    const double h = 1e-4;
    double max_drift = 0.0;
    for (int i = 0; i < 20000; ++i) {  // 2 s
        s = rk4_step(s, h, basis, no_control, nullptr);
        if (i % 200 == 0)
            max_drift = std::max(max_drift, std::abs(total_energy(s, basis).total() - e0));
    }
    CHECK(max_drift / std::abs(e0) < 1e-7);
}

TEST_CASE("energy balance tracks the injected power under forcing") {
    BeamParams beam = paper_like_beam();
    const ModalBasis basis(beam);

    PlantState s = PlantState::zero(2);
    s.theta() = -0.2;
    const double h = 1e-4;
    auto control = [](const PlantState& p) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
        u[0] = 0.4 * std::sin(3.0 * p.theta());  // smooth state-dependent torque
        u[1] = 0.05;
        return u;
    };
    double work = 0.0;
    const double e0 = total_energy(s, basis).total();
    for (int i = 0; i < 20000; ++i) {
        const Eigen::VectorXd power_before = control(s);
        const Eigen::VectorXd rates_before = s.rates();
        s = rk4_step(s, h, basis, control, nullptr);
        const Eigen::VectorXd power_after = control(s);
        const Eigen::VectorXd rates_after = s.rates();
        work += 0.5 * h * (power_before.dot(rates_before) + power_after.dot(rates_after));
    }
    const double e1 = total_energy(s, basis).total();
    CHECK(e1 - e0 == doctest::Approx(work).epsilon(1e-5));
}

TEST_CASE("step halving shows fourth order convergence") {
    BeamParams beam = paper_like_beam();
    const ModalBasis basis(beam);
    auto no_control = [](const PlantState&) { return Eigen::VectorXd::Zero(3); };

    PlantState s0 = PlantState::zero(2);
    s0.theta() = 0.4;
    s0.q(0) = 0.01;

    auto integrate = [&](double h, int steps) {
        PlantState s = s0;
        for (int i = 0; i < steps; ++i) s = rk4_step(s, h, basis, no_control, nullptr);
        return s.x;
    };
    const double T = 0.04;
    const Eigen::VectorXd ref = integrate(T / 512.0, 512);
    const double err_h = (integrate(T / 32.0, 32) - ref).norm();
    const double err_h2 = (integrate(T / 64.0, 64) - ref).norm();
    const double ratio = err_h / err_h2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("paper scenario settles on the commanded force and penetration") {
    const SimConfig cfg = paper_scenario();
    const SimResult r = run_scenario(cfg);

    CHECK(r.summary.contact_made);
    CHECK(r.summary.contact_time < 1.0);
    CHECK(std::abs(r.summary.force_norm_mean - 5.0) < 0.02 * 5.0);
    CHECK(r.summary.force_norm_max - 5.0 < 0.02 * 5.0);
    CHECK(5.0 - r.summary.force_norm_min < 0.02 * 5.0);
    CHECK(std::abs(r.summary.penetration_mean - 5.0 / 86.9) < 0.02 * (5.0 / 86.9));
    CHECK(r.summary.max_deflection_window < 1e-4);
    CHECK(r.summary.lyapunov_violations_phase1 == 0);
    CHECK(r.summary.tip_error_final < 1e-3);
    CHECK(r.summary.settling_time_force > 0.0);
}

TEST_CASE("force loop engages exactly at the first penetrating sample") {
    const SimConfig cfg = paper_scenario(2.0);
    const SimResult r = run_scenario(cfg);

    int first = -1;
    for (int i = 0; i < r.log.samples(); ++i)
        if (r.log.penetration[i] > 0.0) {
            first = i;
            break;
        }
    REQUIRE(first > 0);
    for (int i = 0; i < r.log.samples(); ++i)
        CHECK(static_cast<bool>(r.log.engaged[i]) == (i >= first));
    CHECK(r.summary.contact_time == doctest::Approx(r.log.t[first]));
}

TEST_CASE("identical configurations give identical trajectories") {
    const SimConfig cfg = paper_scenario(1.0);
    const SimResult a = run_scenario(cfg);
    const SimResult b = run_scenario(cfg);
    REQUIRE(a.log.samples() == b.log.samples());
    for (int i = 0; i < a.log.samples(); ++i) {
        CHECK(a.log.theta[i] == b.log.theta[i]);
        CHECK(a.log.fnorm[i] == b.log.fnorm[i]);
        CHECK(a.log.lyapunov[i] == b.log.lyapunov[i]);
    }
}

TEST_CASE("tip velocity is consistent with the logged positions") {
    SimConfig cfg = paper_scenario(1.0);
    cfg.log_decimation = 1;
    const SimResult r = run_scenario(cfg);
    const double h = cfg.step;
    double worst = 0.0;
    for (int i = 200; i + 1 < r.log.samples() - 1; i += 97) {
        const double vx = (r.log.px[i + 1] - r.log.px[i - 1]) / (2.0 * h);
        const double vy = (r.log.py[i + 1] - r.log.py[i - 1]) / (2.0 * h);
        // J * rates reconstructed from the logged state
        const ModalBasis basis(cfg.beam);
        Eigen::VectorXd coords(3), rates(3);
        coords << r.log.theta[i], r.log.q(i, 0), r.log.q(i, 1);
        rates << r.log.theta_dot[i], r.log.q_dot(i, 0), r.log.q_dot(i, 1);
        const Vec2 jv = tip_velocity(basis, coords, rates);
        worst = std::max(worst, std::hypot(vx - jv.x(), vy - jv.y()));
        break;  // one interior probe is enough; the full sweep is O(samples) basis builds
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("zero desired force releases the surface") {
    SimConfig cfg = paper_scenario(6.0);
    cfg.desired_force = 0.0;
    // Plane moved inside the reach so the approach actually touches it.
    cfg.environment->contact_point = 0.98 * Vec2(0.70710678, 0.70710678);
    const SimResult r = run_scenario(cfg);
    CHECK(r.summary.contact_made);
    CHECK(r.summary.force_norm_mean < 0.02);
    CHECK(r.summary.penetration_mean < 2e-4);
}

TEST_CASE("no contact within the horizon is reported, not fatal") {
    SimConfig cfg = paper_scenario(0.5);
    cfg.environment->contact_point = Vec2(5.0, 5.0);  // far outside the reach
    const SimResult r = run_scenario(cfg);
    CHECK_FALSE(r.summary.contact_made);
    CHECK(r.summary.contact_time == -1.0);
    CHECK(r.summary.force_norm_mean == 0.0);
}

TEST_CASE("over-sized steps are rejected against the fastest mode") {
    SimConfig cfg = paper_scenario(1.0);
    cfg.step = 0.01;  // mode 2 period is ~45 ms
    CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

TEST_CASE("runaway feedback is reported as divergence with a timestamp") {
    SimConfig cfg = paper_scenario(2.0);
    cfg.kv_diag = Eigen::Vector3d(3.0e4, 1.0, 0.5);  // sampled loop far beyond stability
    try {
        run_scenario(cfg);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < 2.0);
    }
}

TEST_CASE("quintic reference profile ramps between the endpoints") {
    SimConfig cfg = paper_scenario(1.0);
    cfg.rise_time = 2.0;
    cfg.environment.reset();
    cfg.log_decimation = 100;
    const SimResult r = run_scenario(cfg);
    // Mid-ramp the joint lags the target; it must end between the endpoints.
    const double theta_target = std::numbers::pi / 4.0;
    CHECK(r.log.theta.back() > 0.1 * theta_target);
    CHECK(r.log.theta.back() < theta_target);
}

TEST_CASE("sweep preserves ordering and isolates failures") {
    std::vector<SimConfig> configs;
    configs.push_back(paper_scenario(0.5));
    SimConfig bad = paper_scenario(0.5);
    bad.kv_diag = Eigen::Vector3d(3.0e4, 1.0, 0.5);
    configs.push_back(bad);
    configs.push_back(paper_scenario(0.5));

    const std::vector<SweepOutcome> out = sweep(configs);
    REQUIRE(out.size() == 3);
    CHECK(out[0].result.has_value());
    CHECK(out[0].error.empty());
    CHECK_FALSE(out[1].result.has_value());
    CHECK_FALSE(out[1].error.empty());
    CHECK(out[2].result.has_value());
    // Independent instances: identical configs at both ends agree exactly.
    CHECK(out[0].result->summary.final_theta == out[2].result->summary.final_theta);
}
