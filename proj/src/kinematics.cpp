#include "flexlink/kinematics.hpp"
#include "flexlink/errors.hpp"

#include <cmath>

namespace flexlink {

namespace {

void check_coords(const ModalBasis& basis, const Eigen::VectorXd& coords) {
    if (coords.size() != basis.mode_count() + 1)
        throw ConfigError("coordinate vector must have nu+1 entries");
}

double tip_deflection(const ModalBasis& basis, const Eigen::VectorXd& coords) {
    double w = 0.0;
    for (int j = 0; j < basis.mode_count(); ++j) w += basis.tip_value(j) * coords[j + 1];
    return w;
}

} // namespace

double deflection(const ModalBasis& basis, const Eigen::VectorXd& coords, double x) {
    check_coords(basis, coords);
    double w = 0.0;
    for (int j = 0; j < basis.mode_count(); ++j) w += basis.shape(j, x) * coords[j + 1];
    return w;
}

Vec2 tip_position(const ModalBasis& basis, const Eigen::VectorXd& coords) {
    check_coords(basis, coords);
    const double l = basis.beam().length;
    const double c = std::cos(coords[0]);
    const double s = std::sin(coords[0]);
    const double w = tip_deflection(basis, coords);
    return {l * c - w * s, l * s + w * c};
}

Eigen::Matrix2Xd tip_jacobian(const ModalBasis& basis, const Eigen::VectorXd& coords) {
    check_coords(basis, coords);
    const int nu = basis.mode_count();
    const double l = basis.beam().length;
    const double c = std::cos(coords[0]);
    const double s = std::sin(coords[0]);
    const double w = tip_deflection(basis, coords);

    Eigen::Matrix2Xd jac(2, nu + 1);
    jac(0, 0) = -l * s - w * c;
    jac(1, 0) = l * c - w * s;
    for (int j = 0; j < nu; ++j) {
        const double phil = basis.tip_value(j);
        jac(0, j + 1) = -phil * s;
        jac(1, j + 1) = phil * c;
    }
    return jac;
}

Vec2 tip_velocity(const ModalBasis& basis, const Eigen::VectorXd& coords,
                  const Eigen::VectorXd& rates) {
    return tip_jacobian(basis, coords) * rates;
}

} // namespace flexlink
