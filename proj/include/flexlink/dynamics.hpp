#pragma once
#include "flexlink/modal_basis.hpp"

#include <Eigen/Dense>

namespace flexlink {

/// Plant state [theta, theta_dot, q1, q1_dot, ..., qnu, qnu_dot].
struct PlantState {
    Eigen::VectorXd x;

    static PlantState zero(int mode_count) {
        PlantState s;
        s.x = Eigen::VectorXd::Zero(2 + 2 * mode_count);
        return s;
    }
    static PlantState from_vector(const Eigen::VectorXd& v) { return PlantState{v}; }

    int mode_count() const { return static_cast<int>((x.size() - 2) / 2); }
    double theta() const { return x[0]; }
    double theta_dot() const { return x[1]; }
    double q(int j) const { return x[2 + 2 * j]; }
    double q_dot(int j) const { return x[3 + 2 * j]; }
    double& theta() { return x[0]; }
    double& theta_dot() { return x[1]; }
    double& q(int j) { return x[2 + 2 * j]; }
    double& q_dot(int j) { return x[3 + 2 * j]; }

    /// Generalized coordinates [theta, q1, ..., qnu].
    Eigen::VectorXd coords() const;
    /// Generalized rates [theta_dot, q1_dot, ..., qnu_dot].
    Eigen::VectorXd rates() const;

    /// Throws ConfigError if the layout does not match the mode count or holds non-finite values.
    void validate(int mode_count) const;
};

/// Structured form of the equation of motion M p'' + C p' + g + eta = u.
struct DynamicsMatrices {
    Eigen::MatrixXd inertia;   ///< M, symmetric positive definite
    Eigen::MatrixXd coriolis;  ///< C from the Christoffel symbols of M
    Eigen::VectorXd gravity;   ///< g, gradient of the gravitational potential
    Eigen::VectorXd elastic;   ///< eta, modal restoring forces (theta entry 0)
};

/// Build M, C, g, eta at the given state.
DynamicsMatrices dynamics_matrices(const PlantState& state, const ModalBasis& basis);

/// Solve M p'' = u - C p' - g - eta for the generalized accelerations.
/// u has dimension nu+1 (joint torque in the theta channel).
/// Throws NumericError if M is not positive definite.
Eigen::VectorXd generalized_accel(const PlantState& state, const Eigen::VectorXd& u,
                                  const ModalBasis& basis);

/// Time derivative of the interleaved state vector under generalized force u.
Eigen::VectorXd state_derivative(const PlantState& state, const Eigen::VectorXd& u,
                                 const ModalBasis& basis);

struct EnergyBreakdown {
    double kinetic = 0.0;    ///< K [J]
    double potential = 0.0;  ///< V = V_g + V_e [J]
    double total() const { return kinetic + potential; }
};

/// Kinetic and potential energy of the state.
EnergyBreakdown total_energy(const PlantState& state, const ModalBasis& basis);

} // namespace flexlink
