#include "flexlink/simulator.hpp"
#include "flexlink/errors.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>

namespace flexlink {

namespace {

/// Joint reference profile for the free-space phase: constant hold when
/// rise_time == 0, otherwise a quintic ramp (zero end velocities) then hold.
struct JointProfile {
    double theta0 = 0.0;
    double theta_target = 0.0;
    double rise_time = 0.0;

    void eval(double t, double& pos, double& vel) const {
        if (rise_time <= 0.0 || t >= rise_time) {
            pos = theta_target;
            vel = 0.0;
            return;
        }
        const double s = t / rise_time;
        const double s2 = s * s;
        const double shape = s2 * s * (10.0 - 15.0 * s + 6.0 * s2);
        const double dshape = 30.0 * s2 * (1.0 - 2.0 * s + s2) / rise_time;
        pos = theta0 + (theta_target - theta0) * shape;
        vel = (theta_target - theta0) * dshape;
    }
};

Eigen::VectorXd plant_rhs(const PlantState& s, const ModalBasis& basis,
                          const std::function<Eigen::VectorXd(const PlantState&)>& control,
                          const Environment* env) {
    Eigen::VectorXd u = control(s);
    if (env) {
        const Eigen::VectorXd coords = s.coords();
        const ContactForce fc = contact_force(tip_position(basis, coords), *env);
        if (fc.in_contact) u -= reaction_torque(tip_jacobian(basis, coords), fc);
    }
    return state_derivative(PlantState{s.x}, u, basis);
}

} // namespace

void SimConfig::validate() const {
    beam.validate();
    if (!(step > 0.0)) throw ConfigError("simulation step must be > 0");
    if (!(duration > step)) throw ConfigError("simulation duration must exceed the step");
    if (log_decimation < 1) throw ConfigError("log decimation must be >= 1");
    const int n = beam.mode_count + 1;
    if (kp_diag.size() != n || kv_diag.size() != n)
        throw ConfigError("gain diagonals must have nu+1 entries");
    if (environment && !(desired_force >= 0.0))
        throw ConfigError("desired force must be >= 0");
    if (!(rise_time >= 0.0)) throw ConfigError("rise time must be >= 0");
}

PlantState rk4_step(const PlantState& state, double h, const ModalBasis& basis,
                    const std::function<Eigen::VectorXd(const PlantState&)>& control,
                    const Environment* env) {
    const Eigen::VectorXd k1 = plant_rhs(state, basis, control, env);
    const Eigen::VectorXd k2 =
        plant_rhs(PlantState{state.x + 0.5 * h * k1}, basis, control, env);
    const Eigen::VectorXd k3 =
        plant_rhs(PlantState{state.x + 0.5 * h * k2}, basis, control, env);
    const Eigen::VectorXd k4 = plant_rhs(PlantState{state.x + h * k3}, basis, control, env);
    return PlantState{state.x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)};
}

SimResult run_scenario(const SimConfig& config) {
    const auto wall_start = std::chrono::steady_clock::now();
    config.validate();

    const ModalBasis basis(config.beam, config.basis);
    const int nu = basis.mode_count();
    const ModalConstants& consts = basis.constants();

    // The step must resolve the fastest retained mode.
    const double omega_max = std::sqrt(consts.omega_sq(nu - 1));
    const double min_period = 2.0 * std::numbers::pi / omega_max;
    if (config.step > min_period / 20.0) {
        std::ostringstream msg;
        msg << "step " << config.step << " too large for mode " << nu
            << " (need <= " << min_period / 20.0 << ")";
        throw ConfigError(msg.str());
    }

    const TrackingGains gains = TrackingGains::diagonal(config.kp_diag, config.kv_diag);
    const Environment* env = config.environment ? &*config.environment : nullptr;

    const Vec2 fd_vec = env ? Vec2(config.desired_force * (-env->normal)) : Vec2::Zero();
    std::optional<ForceLoop> force_loop;
    if (env) force_loop.emplace(fd_vec, config.force_gain, env->stiffness);

    JointProfile profile;
    profile.theta0 = config.theta0;
    profile.theta_target = std::atan2(config.target.y(), config.target.x());
    profile.rise_time = config.rise_time;

    const double h = config.step;
    const long steps = std::lround(config.duration / h);
    const long ns = steps / config.log_decimation + 1;

    SimLog log;
    log.t.reserve(ns);
    log.theta.reserve(ns);
    log.theta_dot.reserve(ns);
    log.q.resize(ns, nu);
    log.q_dot.resize(ns, nu);
    log.u.resize(ns, nu + 1);
    for (auto* v : {&log.px, &log.py, &log.fcx, &log.fcy, &log.fnorm, &log.lyapunov,
                    &log.lyapunov_rate, &log.w_tip, &log.kinetic, &log.potential,
                    &log.penetration, &log.velocity_error})
        v->reserve(ns);
    log.engaged.reserve(ns);

    PlantState state = PlantState::zero(nu);
    state.theta() = config.theta0;

    SimSummary sum;
    for (int j = 0; j < nu; ++j)
        sum.natural_frequencies.push_back(std::sqrt(consts.omega_sq(j)));
    sum.window_start = 0.9 * config.duration;

    bool engaged = false;
    double v_prev = 0.0;
    bool have_v_prev = false;

    double force_band_exit = 0.0;  // last time ||fc|| was outside the 2% band
    long window_count = 0;
    double force_sum = 0.0, pen_sum = 0.0;

    JointReference ref = JointReference::hold(Eigen::VectorXd::Zero(nu + 1));

    for (long i = 0; i <= steps; ++i) {
        const double t = i * h;
        const Eigen::VectorXd coords = state.coords();
        const Eigen::VectorXd rates = state.rates();

        const Vec2 tip = tip_position(basis, coords);
        ContactForce fc;
        if (env) fc = contact_force(tip, *env);

        // The outer loop is engaged from the first penetrating sample onward.
        if (env && fc.penetration > 0.0 && !engaged) {
            engaged = true;
            sum.contact_made = true;
            sum.contact_time = t;
        }

        bool clamped = false;
        if (engaged) {
            ref = cartesian_to_joint_reference(config.target + force_loop->offset(),
                                               force_loop->reference_rate(), basis, coords,
                                               &clamped);
            if (clamped) ++sum.reference_clamps;
        } else {
            double pos = 0.0, vel = 0.0;
            profile.eval(t, pos, vel);
            ref.position.setZero(nu + 1);
            ref.velocity.setZero(nu + 1);
            ref.acceleration.setZero(nu + 1);
            ref.position[0] = pos;
            ref.velocity[0] = vel;
        }

        const DynamicsMatrices dyn = dynamics_matrices(state, basis);
        const Eigen::VectorXd u = tracking_control(state, ref, gains, dyn);
        const LyapunovSample lyap = lyapunov_value(state, ref, gains, dyn);

        // Phase-1 Lyapunov monitor at full step resolution.
        if (i == 0) sum.lyapunov_initial = lyap.value;
        if (!engaged) {
            if (have_v_prev && lyap.value > v_prev + 1e-6 * sum.lyapunov_initial)
                ++sum.lyapunov_violations_phase1;
            v_prev = lyap.value;
            have_v_prev = true;
        }

        const Vec2 tip_rate = tip_velocity(basis, coords, rates);
        const Vec2 ref_rate = engaged ? force_loop->reference_rate()
                                      : Vec2(tip_jacobian(basis, coords).col(0) * ref.velocity[0]);
        const double vel_err = (ref_rate - tip_rate).norm();

        if (i % config.log_decimation == 0) {
            const long r = i / config.log_decimation;
            log.t.push_back(t);
            log.theta.push_back(state.theta());
            log.theta_dot.push_back(state.theta_dot());
            for (int j = 0; j < nu; ++j) {
                log.q(r, j) = state.q(j);
                log.q_dot(r, j) = state.q_dot(j);
            }
            log.u.row(r) = u.transpose();
            log.px.push_back(tip.x());
            log.py.push_back(tip.y());
            log.fcx.push_back(fc.force.x());
            log.fcy.push_back(fc.force.y());
            log.fnorm.push_back(fc.force.norm());
            log.lyapunov.push_back(lyap.value);
            log.lyapunov_rate.push_back(lyap.rate);
            log.w_tip.push_back(deflection(basis, coords, config.beam.length));
            const EnergyBreakdown en = total_energy(state, basis);
            log.kinetic.push_back(en.kinetic);
            log.potential.push_back(en.potential);
            log.penetration.push_back(fc.penetration);
            log.velocity_error.push_back(vel_err);
            log.engaged.push_back(engaged ? 1 : 0);
        }

        // Steady-state window statistics.
        if (t >= sum.window_start) {
            ++window_count;
            const double fn = fc.force.norm();
            force_sum += fn;
            pen_sum += fc.penetration;
            if (window_count == 1) {
                sum.force_norm_min = sum.force_norm_max = fn;
            } else {
                sum.force_norm_min = std::min(sum.force_norm_min, fn);
                sum.force_norm_max = std::max(sum.force_norm_max, fn);
            }
            sum.force_error_limsup =
                std::max(sum.force_error_limsup, (fc.force - fd_vec).norm());
            sum.max_deflection_window = std::max(
                sum.max_deflection_window, std::abs(deflection(basis, coords, config.beam.length)));
            sum.velocity_error_sup = std::max(sum.velocity_error_sup, vel_err);
        }
        if (env && config.desired_force > 0.0) {
            if (std::abs(fc.force.norm() - config.desired_force) >
                0.02 * config.desired_force)
                force_band_exit = t + h;  // still outside the band after this sample
        }

        if (i == steps) {
            sum.tracking_error_final = (ref.position - coords).norm();
            sum.final_theta = state.theta();
            sum.final_tip = tip;
            const EnergyBreakdown en = total_energy(state, basis);
            sum.energy_kinetic_final = en.kinetic;
            sum.energy_potential_final = en.potential;
            Vec2 setpoint = config.target;
            if (env)
                setpoint = env->contact_point +
                           env->stiffness.fullPivLu().solve(Eigen::Vector2d(fd_vec));
            sum.tip_error_final = (tip - setpoint).norm();
            break;
        }

        // Sampled outer loop: the Cartesian reference offset advances once per step.
        if (engaged) force_loop->update(fc, h);

        // RK4 with the tracking law evaluated at the stage states and the
        // reference frozen across the step; contact acts at the stage states
        // inside the plant right-hand side.
        state = rk4_step(state, h, basis,
                         [&](const PlantState& s) {
                             const DynamicsMatrices d = dynamics_matrices(s, basis);
                             return tracking_control(s, ref, gains, d);
                         },
                         env);

        if (!state.x.allFinite() ||
            state.x.cwiseAbs().maxCoeff() > config.divergence_limit) {
            std::ostringstream msg;
            msg << "simulation diverged at t=" << t + h;
            throw DivergenceError(t + h, msg.str());
        }
    }

    if (env && config.desired_force > 0.0 && force_band_exit < config.duration)
        sum.settling_time_force = force_band_exit;
    if (window_count > 0) {
        sum.force_norm_mean = force_sum / window_count;
        sum.penetration_mean = pen_sum / window_count;
    }
    const double ke_norm = env ? env->stiffness.operatorNorm() : 0.0;
    sum.force_error_bound =
        env ? ke_norm * sum.velocity_error_sup / config.force_gain : 0.0;

    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return {std::move(log), sum};
}

std::vector<SweepOutcome> sweep(const std::vector<SimConfig>& configs) {
    std::vector<std::future<SimResult>> futures;
    futures.reserve(configs.size());
    for (const auto& cfg : configs)
        futures.push_back(std::async(std::launch::async, [cfg] { return run_scenario(cfg); }));

    std::vector<SweepOutcome> out(configs.size());
    for (size_t i = 0; i < futures.size(); ++i) {
        try {
            out[i].result = futures[i].get();
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

} // namespace flexlink
