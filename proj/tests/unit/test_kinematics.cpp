#include "flexlink/errors.hpp"
#include "flexlink/kinematics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace flexlink;

namespace {

BeamParams test_beam() {
    BeamParams b;
    b.length = 1.0;
    b.area = 1.1e-4;
    b.density = 7850.0;
    b.flexural_rigidity = 34.3612;
    b.joint_inertia = 1.3254e-6;
    b.gravity = 9.81;
    b.mode_count = 2;
    return b;
}

} // namespace

TEST_CASE("deflection is zero for zero modal coordinates and at the clamp") {
    const ModalBasis basis(test_beam());
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(3);
    coords[0] = 0.4;
    for (double x : {0.0, 0.3, 1.0}) CHECK(deflection(basis, coords, x) == 0.0);

    coords[1] = 0.05;
    coords[2] = -0.02;
    CHECK(deflection(basis, coords, 0.0) == 0.0);
    CHECK_THROWS_AS(deflection(basis, coords, -0.1), std::domain_error);
    CHECK_THROWS_AS(deflection(basis, coords, 1.1), std::domain_error);
}

TEST_CASE("tip deflection scales with phi(l) = 2 under the normalization") {
    const ModalBasis basis(test_beam());
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(3);
    const double c = 0.013;
    coords[1] = c;
    CHECK(deflection(basis, coords, 1.0) == doctest::Approx(2.0 * c).epsilon(1e-9));
}

TEST_CASE("tip position covers the rigid poses") {
    const ModalBasis basis(test_beam());
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(3);

    coords[0] = 0.0;
    Vec2 p = tip_position(basis, coords);
    CHECK(p.x() == doctest::Approx(1.0));
    CHECK(p.y() == doctest::Approx(0.0));

    coords[0] = std::numbers::pi / 4.0;
    p = tip_position(basis, coords);
    CHECK(p.x() == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(p.y() == doctest::Approx(0.7071).epsilon(1e-4));

    coords[0] = std::numbers::pi / 2.0;
    p = tip_position(basis, coords);
    CHECK(p.x() == doctest::Approx(0.0).scale(1.0));
    CHECK(p.y() == doctest::Approx(1.0));
}

TEST_CASE("analytic Jacobian matches central finite differences") {
    const ModalBasis basis(test_beam());
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> def(-0.25, 0.25);

    const double step = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        Eigen::VectorXd coords(3);
        coords << ang(rng), def(rng), def(rng);
        const Eigen::Matrix2Xd jac = tip_jacobian(basis, coords);
        for (int k = 0; k < 3; ++k) {
            Eigen::VectorXd lo = coords, hi = coords;
            lo[k] -= step;
            hi[k] += step;
            const Vec2 fd = (tip_position(basis, hi) - tip_position(basis, lo)) / (2.0 * step);
            const double denom = std::max(1.0, fd.norm());
            worst = std::max(worst, (jac.col(k) - fd).norm() / denom);
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("Jacobian structure at the rigid horizontal pose") {
    const ModalBasis basis(test_beam());
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(3);
    const Eigen::Matrix2Xd jac = tip_jacobian(basis, coords);
    CHECK(jac(0, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK(jac(1, 0) == doctest::Approx(1.0));  // l
    for (int j = 0; j < 2; ++j) {
        CHECK(jac(0, j + 1) == doctest::Approx(0.0).scale(1.0));
        CHECK(jac(1, j + 1) == doctest::Approx(basis.tip_value(j)));
        CHECK(jac.col(j + 1).norm() == doctest::Approx(std::abs(basis.tip_value(j))));
    }
}

TEST_CASE("rigid-arm Jacobian column is the rotation tangent") {
    const ModalBasis basis(test_beam());
    for (double th : {-1.2, 0.3, 2.5}) {
        Eigen::VectorXd coords = Eigen::VectorXd::Zero(3);
        coords[0] = th;
        const Eigen::Matrix2Xd jac = tip_jacobian(basis, coords);
        CHECK(jac(0, 0) == doctest::Approx(-std::sin(th)));
        CHECK(jac(1, 0) == doctest::Approx(std::cos(th)));
    }
}

TEST_CASE("tip velocity equals J times the rates") {
    const ModalBasis basis(test_beam());
    Eigen::VectorXd coords(3), rates(3);
    coords << 0.7, 0.03, -0.01;
    rates << 0.5, -0.2, 0.1;
    const Vec2 v = tip_velocity(basis, coords, rates);
    const Vec2 jv = tip_jacobian(basis, coords) * rates;
    CHECK((v - jv).norm() == doctest::Approx(0.0).scale(1.0));
}
