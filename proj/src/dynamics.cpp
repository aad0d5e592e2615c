#include "flexlink/dynamics.hpp"
#include "flexlink/errors.hpp"

#include <cmath>
#include <sstream>

namespace flexlink {

Eigen::VectorXd PlantState::coords() const {
    const int nu = mode_count();
    Eigen::VectorXd p(nu + 1);
    p[0] = theta();
    for (int j = 0; j < nu; ++j) p[j + 1] = q(j);
    return p;
}

Eigen::VectorXd PlantState::rates() const {
    const int nu = mode_count();
    Eigen::VectorXd v(nu + 1);
    v[0] = theta_dot();
    for (int j = 0; j < nu; ++j) v[j + 1] = q_dot(j);
    return v;
}

void PlantState::validate(int nu) const {
    if (x.size() != 2 + 2 * nu) {
        std::ostringstream msg;
        msg << "state dimension " << x.size() << " does not match 2+2*nu = " << 2 + 2 * nu;
        throw ConfigError(msg.str());
    }
    if (!x.allFinite()) throw ConfigError("state contains non-finite entries");
}

DynamicsMatrices dynamics_matrices(const PlantState& state, const ModalBasis& basis) {
    const int nu = basis.mode_count();
    state.validate(nu);
    const ModalConstants& k = basis.constants();
    const double g = basis.beam().gravity;
    const double th = state.theta();
    const double thd = state.theta_dot();
    const double c = std::cos(th);
    const double s = std::sin(th);
    const int n = nu + 1;

    DynamicsMatrices d;
    d.inertia = Eigen::MatrixXd::Zero(n, n);
    d.coriolis = Eigen::MatrixXd::Zero(n, n);
    d.gravity = Eigen::VectorXd::Zero(n);
    d.elastic = Eigen::VectorXd::Zero(n);

    // M(1,1) carries the rotor inertia Ib + rhoA l^3/3 plus the deflection term sum b0 q^2.
    double m00 = k.rotor_inertia();
    for (int j = 0; j < nu; ++j) m00 += k.b0[j] * state.q(j) * state.q(j);
    d.inertia(0, 0) = m00;
    for (int j = 0; j < nu; ++j) {
        d.inertia(0, j + 1) = k.b2[j];
        d.inertia(j + 1, 0) = k.b2[j];
        d.inertia(j + 1, j + 1) = k.b0[j];
    }

    // Christoffel construction: only M(1,1) depends on the coordinates, which leaves
    //   C(1,1) = sum b0 q qdot,  C(1,j+1) = b0 q theta_dot,  C(j+1,1) = -b0 q theta_dot.
    double c00 = 0.0;
    for (int j = 0; j < nu; ++j) {
        const double bq = k.b0[j] * state.q(j);
        c00 += bq * state.q_dot(j);
        d.coriolis(0, j + 1) = bq * thd;
        d.coriolis(j + 1, 0) = -bq * thd;
    }
    d.coriolis(0, 0) = c00;

    double g0 = k.b4 * g * c;
    for (int j = 0; j < nu; ++j) {
        g0 -= g * s * k.b5[j] * state.q(j);
        d.gravity(j + 1) = k.b5[j] * g * c;
        d.elastic(j + 1) = k.b6[j] * state.q(j);
    }
    d.gravity(0) = g0;

    return d;
}

Eigen::VectorXd generalized_accel(const PlantState& state, const Eigen::VectorXd& u,
                                  const ModalBasis& basis) {
    const int n = basis.mode_count() + 1;
    if (u.size() != n) throw ConfigError("generalized force dimension must be nu+1");

    const DynamicsMatrices d = dynamics_matrices(state, basis);
    const Eigen::VectorXd rhs =
        u - d.coriolis * state.rates() - d.gravity - d.elastic;

    Eigen::LLT<Eigen::MatrixXd> llt(d.inertia);
    if (llt.info() != Eigen::Success)
        throw NumericError("inertia matrix is not positive definite");
    Eigen::VectorXd acc = llt.solve(rhs);
    if (!acc.allFinite()) throw NumericError("inertia matrix is singular");
    return acc;
}

Eigen::VectorXd state_derivative(const PlantState& state, const Eigen::VectorXd& u,
                                 const ModalBasis& basis) {
    const int nu = basis.mode_count();
    const Eigen::VectorXd acc = generalized_accel(state, u, basis);
    Eigen::VectorXd dx(state.x.size());
    dx[0] = state.theta_dot();
    dx[1] = acc[0];
    for (int j = 0; j < nu; ++j) {
        dx[2 + 2 * j] = state.q_dot(j);
        dx[3 + 2 * j] = acc[j + 1];
    }
    return dx;
}

EnergyBreakdown total_energy(const PlantState& state, const ModalBasis& basis) {
    const int nu = basis.mode_count();
    state.validate(nu);
    const ModalConstants& k = basis.constants();
    const double g = basis.beam().gravity;
    const double thd = state.theta_dot();
    const double c = std::cos(state.theta());
    const double s = std::sin(state.theta());

    double kin = 0.5 * k.rotor_inertia() * thd * thd;
    double pot = k.b4 * g * s;
    for (int j = 0; j < nu; ++j) {
        const double qj = state.q(j);
        const double qdj = state.q_dot(j);
        kin += 0.5 * k.b0[j] * (qj * qj * thd * thd + qdj * qdj) + k.b2[j] * thd * qdj;
        pot += g * c * k.b5[j] * qj + 0.5 * k.b6[j] * qj * qj;
    }
    return {kin, pot};
}

} // namespace flexlink
