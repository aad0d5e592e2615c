#include "flexlink/contact.hpp"
#include "flexlink/errors.hpp"

#include <cmath>

namespace flexlink {

Environment Environment::isotropic(const Vec2& p0, const Vec2& n, double ke, bool unilateral) {
    Environment env;
    env.contact_point = p0;
    env.normal = n;
    env.stiffness = ke * Eigen::Matrix2d::Identity();
    env.unilateral = unilateral;
    env.validate();
    return env;
}

void Environment::validate() {
    const double norm = normal.norm();
    if (!(norm > 0.0) || !normal.allFinite())
        throw ConfigError("environment normal must be a nonzero finite vector");
    normal /= norm;
    if (!stiffness.allFinite() || (stiffness - stiffness.transpose()).norm() > 1e-12)
        throw ConfigError("environment stiffness Ke must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(stiffness);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError("environment stiffness Ke must be positive definite");
}

ContactForce contact_force(const Vec2& tip, const Environment& env) {
    ContactForce fc;
    const Vec2 d = tip - env.contact_point;
    const double depth = -d.dot(env.normal);
    if (depth > 0.0) {
        fc.penetration = depth;
        fc.in_contact = true;
    }
    if (fc.in_contact || !env.unilateral) {
        fc.force = env.stiffness * d;
        fc.in_contact = true;
    }
    return fc;
}

Eigen::VectorXd reaction_torque(const Eigen::Matrix2Xd& jacobian, const ContactForce& fc) {
    return jacobian.transpose() * fc.force;
}

} // namespace flexlink
