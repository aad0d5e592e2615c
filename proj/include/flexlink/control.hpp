#pragma once
#include "flexlink/contact.hpp"
#include "flexlink/dynamics.hpp"

#include <Eigen/Dense>

namespace flexlink {

/// Validated proportional/derivative gain pair with the cached ratio Delta = Kv^-1 Kp.
/// Kp and Kv must be symmetric positive definite and Delta nonsingular; violations
/// are rejected here, at configuration time, not per control step.
class TrackingGains {
public:
    TrackingGains(Eigen::MatrixXd kp, Eigen::MatrixXd kv);
    static TrackingGains diagonal(const Eigen::VectorXd& kp, const Eigen::VectorXd& kv);

    const Eigen::MatrixXd& kp() const { return kp_; }
    const Eigen::MatrixXd& kv() const { return kv_; }
    const Eigen::MatrixXd& delta() const { return delta_; }
    int size() const { return static_cast<int>(kp_.rows()); }

private:
    Eigen::MatrixXd kp_, kv_, delta_;
};

/// Joint-space reference consumed by the tracking loop. The acceleration is
/// held constant (zero) between reference updates.
struct JointReference {
    Eigen::VectorXd position;
    Eigen::VectorXd velocity;
    Eigen::VectorXd acceleration;

    static JointReference hold(const Eigen::VectorXd& pos) {
        return {pos, Eigen::VectorXd::Zero(pos.size()), Eigen::VectorXd::Zero(pos.size())};
    }
};

/// PD tracking law with gravity and vibration compensation:
///   u = Kp e + Kv e' + M [pdd_d + Delta e'] + C [pd_d + Delta e] + g + eta
/// with e = p_d - p, e' = p'_d - p'. dyn must be evaluated at the current state.
Eigen::VectorXd tracking_control(const PlantState& state, const JointReference& ref,
                                 const TrackingGains& gains, const DynamicsMatrices& dyn);

struct LyapunovSample {
    double value = 0.0;  ///< V  = [e'+De]^T M [e'+De] + e^T Kp e
    double rate = 0.0;   ///< dV/dt along the ideal closed loop
};

/// Lyapunov function of the tracking loop and its exact time derivative
///   dV/dt = -2 e'^T Kv e' - 2 e^T D^T Kv D e - 2 e^T D^T Kv e'.
LyapunovSample lyapunov_value(const PlantState& state, const JointReference& ref,
                              const TrackingGains& gains, const DynamicsMatrices& dyn);

/// Outer implicit force loop. Converts the force error df = fc - fd into a
/// Cartesian velocity reference dPd = -k df with k = Ke^-1 kf, and integrates it
/// into a position reference offset added to the tracking target.
class ForceLoop {
public:
    /// desired_force is the full planar force vector to regulate to.
    ForceLoop(const Vec2& desired_force, double loop_gain_kf, const Eigen::Matrix2d& ke);

    /// Advance the offset by one step of dt; returns the current velocity reference.
    Vec2 update(const ContactForce& fc, double dt);

    const Vec2& desired_force() const { return fd_; }
    const Vec2& offset() const { return offset_; }
    const Vec2& reference_rate() const { return rate_; }
    double kf() const { return kf_; }

private:
    Vec2 fd_;
    double kf_;
    Eigen::Matrix2d k_;  // Ke^-1 kf
    Vec2 offset_ = Vec2::Zero();
    Vec2 rate_ = Vec2::Zero();
};

/// Rigid-arm inverse kinematics of a Cartesian reference point:
/// theta_d = atan2(y, x), modal references zero (vibration suppression target),
/// theta_dot_d from the velocity reference via the pseudo-inverse of the theta
/// column of the Jacobian. Points beyond the reachable radius are clamped;
/// *clamped reports it when non-null.
JointReference cartesian_to_joint_reference(const Vec2& p_ref, const Vec2& v_ref,
                                            const ModalBasis& basis,
                                            const Eigen::VectorXd& coords,
                                            bool* clamped = nullptr);

} // namespace flexlink
