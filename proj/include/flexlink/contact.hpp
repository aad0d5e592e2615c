#pragma once
#include "flexlink/kinematics.hpp"

#include <Eigen/Dense>

namespace flexlink {

/// Compliant frictionless contact plane.
///
/// The plane passes through contact_point with outward unit normal pointing
/// toward free space; the tip is in contact once it crosses to the far side.
struct Environment {
    Vec2 contact_point = Vec2::Zero();            ///< P0 [m]
    Vec2 normal = Vec2(-1.0, 0.0);                ///< outward unit normal
    Eigen::Matrix2d stiffness = Eigen::Matrix2d::Identity();  ///< Ke [N/m]
    bool unilateral = true;

    /// Scalar stiffness promoted to Ke * I.
    static Environment isotropic(const Vec2& p0, const Vec2& n, double ke,
                                 bool unilateral = true);

    /// Normalizes the normal; throws ConfigError if it is zero or Ke is not SPD.
    void validate();
};

struct ContactForce {
    Vec2 force = Vec2::Zero();  ///< force applied by the tip on the environment [N]
    double penetration = 0.0;   ///< depth past the plane, >= 0 [m]
    bool in_contact = false;
};

/// Spring law fc = Ke (P - P0), active while the penetration
/// delta = max(0, -(P - P0) . n) is positive (always active when unilateral = false).
ContactForce contact_force(const Vec2& tip, const Environment& env);

/// Generalized reaction torque tau_e = J^T fc (dimension nu+1).
/// Enters the plant as u = tau - tau_e.
Eigen::VectorXd reaction_torque(const Eigen::Matrix2Xd& jacobian, const ContactForce& fc);

} // namespace flexlink
