#include "flexlink/control.hpp"
#include "flexlink/errors.hpp"

#include <cmath>
#include <sstream>

namespace flexlink {

namespace {

void require_spd(const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != m.cols()) throw ConfigError(std::string(name) + " must be square");
    if (!m.allFinite()) throw ConfigError(std::string(name) + " has non-finite entries");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.norm()))
        throw ConfigError(std::string(name) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError(std::string(name) + " must be positive definite");
}

} // namespace

TrackingGains::TrackingGains(Eigen::MatrixXd kp, Eigen::MatrixXd kv)
    : kp_(std::move(kp)), kv_(std::move(kv)) {
    require_spd(kp_, "Kp");
    require_spd(kv_, "Kv");
    if (kp_.rows() != kv_.rows()) throw ConfigError("Kp and Kv must have the same size");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kv_);
    delta_ = lu.solve(kp_);
    Eigen::FullPivLU<Eigen::MatrixXd> lud(delta_);
    if (!lud.isInvertible() || !delta_.allFinite())
        throw ConfigError("Delta = Kv^-1 Kp must be nonsingular");
}

TrackingGains TrackingGains::diagonal(const Eigen::VectorXd& kp, const Eigen::VectorXd& kv) {
    if (kp.size() != kv.size()) throw ConfigError("Kp and Kv diagonals must have the same size");
    return TrackingGains(kp.asDiagonal().toDenseMatrix(), kv.asDiagonal().toDenseMatrix());
}

Eigen::VectorXd tracking_control(const PlantState& state, const JointReference& ref,
                                 const TrackingGains& gains, const DynamicsMatrices& dyn) {
    const Eigen::VectorXd e = ref.position - state.coords();
    const Eigen::VectorXd ed = ref.velocity - state.rates();
    return gains.kp() * e + gains.kv() * ed +
           dyn.inertia * (ref.acceleration + gains.delta() * ed) +
           dyn.coriolis * (ref.velocity + gains.delta() * e) + dyn.gravity + dyn.elastic;
}

LyapunovSample lyapunov_value(const PlantState& state, const JointReference& ref,
                              const TrackingGains& gains, const DynamicsMatrices& dyn) {
    const Eigen::VectorXd e = ref.position - state.coords();
    const Eigen::VectorXd ed = ref.velocity - state.rates();
    const Eigen::VectorXd z = ed + gains.delta() * e;
    const Eigen::VectorXd de = gains.delta() * e;

    LyapunovSample out;
    out.value = z.dot(dyn.inertia * z) + e.dot(gains.kp() * e);
    out.rate = -2.0 * ed.dot(gains.kv() * ed) - 2.0 * de.dot(gains.kv() * de) -
               2.0 * de.dot(gains.kv() * ed);
    return out;
}

ForceLoop::ForceLoop(const Vec2& desired_force, double loop_gain_kf, const Eigen::Matrix2d& ke)
    : fd_(desired_force), kf_(loop_gain_kf) {
    if (!(kf_ > 0.0)) throw ConfigError("force loop gain kf must be > 0");
    Eigen::FullPivLU<Eigen::Matrix2d> lu(ke);
    if (!lu.isInvertible()) throw ConfigError("environment stiffness must be invertible");
    k_ = lu.inverse() * kf_;
}

Vec2 ForceLoop::update(const ContactForce& fc, double dt) {
    if (!(dt > 0.0)) throw ConfigError("force loop step must be > 0");
    const Vec2 df = fc.force - fd_;
    rate_ = -k_ * df;
    offset_ += rate_ * dt;
    if (!offset_.allFinite()) throw NumericError("force loop integral state is not finite");
    return rate_;
}

JointReference cartesian_to_joint_reference(const Vec2& p_ref, const Vec2& v_ref,
                                            const ModalBasis& basis,
                                            const Eigen::VectorXd& coords, bool* clamped) {
    const int n = basis.mode_count() + 1;
    Vec2 p = p_ref;

    // Reachable radius: rigid length plus the current elastic margin.
    const double margin = std::abs(deflection(basis, coords, basis.beam().length));
    const double reach = basis.beam().length + margin;
    bool was_clamped = false;
    const double r = p.norm();
    if (r > reach && r > 0.0) {
        p *= reach / r;
        was_clamped = true;
    }
    if (clamped) *clamped = was_clamped;

    JointReference ref;
    ref.position = Eigen::VectorXd::Zero(n);
    ref.velocity = Eigen::VectorXd::Zero(n);
    ref.acceleration = Eigen::VectorXd::Zero(n);
    ref.position[0] = std::atan2(p.y(), p.x());

    // theta rate from the velocity reference through the theta column of J.
    const Eigen::Matrix2Xd jac = tip_jacobian(basis, coords);
    const Vec2 jtheta = jac.col(0);
    const double denom = jtheta.squaredNorm();
    if (denom > 0.0) ref.velocity[0] = jtheta.dot(v_ref) / denom;
    return ref;
}

} // namespace flexlink
