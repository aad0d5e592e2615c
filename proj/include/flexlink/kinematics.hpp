#pragma once
#include "flexlink/modal_basis.hpp"

#include <Eigen/Dense>

namespace flexlink {

using Vec2 = Eigen::Vector2d;

/// Transverse deflection w(x) = sum_j phi_j(x) q_j at a point along the beam.
/// coords = [theta, q1, ..., qnu]; throws std::domain_error for x outside [0,l].
double deflection(const ModalBasis& basis, const Eigen::VectorXd& coords, double x);

/// Planar end-effector position including the elastic tip deflection:
///   P = (l cos(theta) - w(l) sin(theta), l sin(theta) + w(l) cos(theta)).
Vec2 tip_position(const ModalBasis& basis, const Eigen::VectorXd& coords);

/// Analytic Jacobian dP/d[theta, q1, ..., qnu], a 2 x (nu+1) matrix.
Eigen::Matrix2Xd tip_jacobian(const ModalBasis& basis, const Eigen::VectorXd& coords);

/// Tip velocity J(coords) * rates.
Vec2 tip_velocity(const ModalBasis& basis, const Eigen::VectorXd& coords,
                  const Eigen::VectorXd& rates);

} // namespace flexlink
