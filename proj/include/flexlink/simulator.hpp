#pragma once
#include "flexlink/contact.hpp"
#include "flexlink/control.hpp"
#include "flexlink/dynamics.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flexlink {

/// Complete description of one closed-loop run.
struct SimConfig {
    BeamParams beam;
    BasisOptions basis;
    std::optional<Environment> environment;  ///< absent = free-space tracking only

    Eigen::VectorXd kp_diag;  ///< diagonal of Kp, size nu+1
    Eigen::VectorXd kv_diag;  ///< diagonal of Kv, size nu+1
    double desired_force = 0.0;  ///< fd magnitude [N], pressed along -normal
    double force_gain = 1.0;     ///< outer loop gain kf [1/s]

    double step = 1e-4;      ///< fixed integrator step h [s]
    double duration = 20.0;  ///< total simulated time T [s]
    double rise_time = 0.0;  ///< quintic rise of the joint reference; 0 = step reference
    double theta0 = 0.0;     ///< initial joint angle [rad]
    Vec2 target = Vec2(1.0, 0.0);  ///< Cartesian tracking target [m]
    int log_decimation = 1;        ///< keep every k-th sample
    double divergence_limit = 1e8;

    /// Basic invariants (h > 0, T > h, gains sized); throws ConfigError.
    void validate() const;
};

/// Time series captured during a run (decimated).
struct SimLog {
    std::vector<double> t, theta, theta_dot;
    Eigen::MatrixXd q, q_dot;  ///< one row per sample, one column per mode
    std::vector<double> px, py, fcx, fcy, fnorm;
    Eigen::MatrixXd u;  ///< control torque rows, nu+1 columns
    std::vector<double> lyapunov, lyapunov_rate, w_tip, kinetic, potential;
    // Channels beyond the CSV schema, used by the verification tooling.
    std::vector<double> penetration, velocity_error;
    std::vector<char> engaged;

    int samples() const { return static_cast<int>(t.size()); }
};

struct SimSummary {
    bool contact_made = false;
    double contact_time = -1.0;
    double window_start = 0.0;  ///< steady-state window = final 10% of the run

    double force_norm_mean = 0.0, force_norm_min = 0.0, force_norm_max = 0.0;
    double force_error_limsup = 0.0;  ///< max ||fc - fd_vec|| over the window
    double penetration_mean = 0.0;
    double max_deflection_window = 0.0;
    double settling_time_force = -1.0;  ///< first entry into the +-2% force band

    double tracking_error_final = 0.0;  ///< ||p_d - p|| at the end of the run
    double tip_error_final = 0.0;       ///< distance to the static force setpoint
    double final_theta = 0.0;
    Vec2 final_tip = Vec2::Zero();

    double lyapunov_initial = 0.0;
    int lyapunov_violations_phase1 = 0;  ///< per-step tolerance 1e-6 * V(0)

    double velocity_error_sup = 0.0;  ///< S: max ||dPd - dP|| over the window
    double force_error_bound = 0.0;   ///< ||Ke|| S / kf

    std::vector<double> natural_frequencies;  ///< omega_j [rad/s]
    long reference_clamps = 0;
    double energy_kinetic_final = 0.0, energy_potential_final = 0.0;
    double wall_seconds = 0.0;
};

struct SimResult {
    SimLog log;
    SimSummary summary;
};

/// One fixed RK4 step of the plant under the given control policy. The policy
/// is evaluated at every stage state; contact forces (when env is non-null)
/// act on the plant at the stage states as well.
PlantState rk4_step(const PlantState& state, double h, const ModalBasis& basis,
                    const std::function<Eigen::VectorXd(const PlantState&)>& control,
                    const Environment* env);

/// Integrate the full closed-loop scenario: free-space tracking toward the
/// target, then implicit force regulation from the first penetrating sample on.
/// Throws DivergenceError if the state leaves the configured bounds.
SimResult run_scenario(const SimConfig& config);

struct SweepOutcome {
    std::optional<SimResult> result;
    std::string error;  ///< non-empty if this row diverged or failed
};

/// Run independent scenarios (in parallel); outcomes are ordered like the input.
std::vector<SweepOutcome> sweep(const std::vector<SimConfig>& configs);

} // namespace flexlink
