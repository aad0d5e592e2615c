#pragma once
#include <functional>
#include <vector>

namespace flexlink {

/// Physical description of one flexible link with a rigid rotational joint.
struct BeamParams {
    double length = 1.0;             ///< l [m]
    double area = 1.0e-4;            ///< cross section A [m^2]
    double density = 2700.0;         ///< rho [kg/m^3]
    double flexural_rigidity = 1.0;  ///< EI [N m^2]
    double joint_inertia = 0.0;      ///< Ib [kg m^2], hub inertia at the joint
    double gravity = 9.81;           ///< g magnitude [m/s^2], acting along -y
    int mode_count = 2;              ///< number of assumed modes (>= 1)

    double linear_density() const { return density * area; }  ///< rho*A [kg/m]

    /// Throws ConfigError if any invariant is violated.
    void validate() const;
};

/// One clamped-free Euler-Bernoulli mode shape
///   phi(x) = scale * [cosh(bx) - cos(bx) - sigma (sinh(bx) - sin(bx))],  b = root/length,
/// normalized so that the integral of phi^2 over [0,l] equals l (tip value +-2).
struct ModeShape {
    int index = 1;        ///< 1-based mode number
    double root = 0.0;    ///< beta*l, root of cos(x)cosh(x) + 1 = 0
    double sigma = 0.0;   ///< (cosh + cos)/(sinh + sin) at the root
    double scale = 1.0;   ///< normalization constant
    double length = 1.0;  ///< beam length [m]

    /// Evaluate phi or one of its spatial derivatives (order 0..3) at x in [0,l].
    /// Throws std::domain_error outside the beam.
    double eval(double x, int order = 0) const;

    double wavenumber() const { return root / length; }
};

/// Modal integrals a0..a3 and the lumped constants b0..b8 of the plant.
///
/// Per mode j: a0 = int phi^2, a1 = int phi x, a2 = int phi, a3 = int (phi'')^2,
/// b0 = rhoA a0, b1 = rhoA a1^2/a0, b2 = rhoA a1, b3 = a1/a0, b5 = rhoA a2,
/// b6 = EI a3, b7 = a2/a0. Shared: b4 = rhoA l^2/2 and b8 = Ib.
/// rigid_inertia = rhoA l^3/3 is the rigid-beam term of the rotational kinetic
/// energy; the joint sees b8 + rigid_inertia in total.
struct ModalConstants {
    std::vector<double> a0, a1, a2, a3;
    std::vector<double> b0, b1, b2, b3, b5, b6, b7;
    double b4 = 0.0;
    double b8 = 0.0;
    double rigid_inertia = 0.0;

    double rotor_inertia() const { return b8 + rigid_inertia; }
    /// Squared natural frequency of mode j (0-based), omega_j^2 = b6/b0.
    double omega_sq(int j) const { return b6[j] / b0[j]; }
};

/// Numerical knobs for root solving and quadrature.
struct BasisOptions {
    double root_tol = 1e-13;  ///< tolerance on the characteristic root
    int quad_panels = 4096;   ///< composite Simpson panels (forced even)
    double quad_tol = 1e-7;   ///< absolute tolerance for the quadrature convergence check
};

/// Roots of cos(x)cosh(x) + 1 = 0, bracketed per [(j-1)pi, j pi], in increasing order.
/// Throws ConfigError on bad arguments, NumericError if a bracket fails.
std::vector<double> solve_characteristic_roots(int count, double tol = 1e-13);

/// Composite Simpson rule on [a,b]; panels is rounded up to the next even count.
double simpson(const std::function<double(double)>& f, double a, double b, int panels);

/// Immutable bundle of beam parameters, mode shapes and modal constants.
class ModalBasis {
public:
    explicit ModalBasis(const BeamParams& beam, const BasisOptions& opts = {});

    const BeamParams& beam() const { return beam_; }
    const BasisOptions& options() const { return opts_; }
    int mode_count() const { return static_cast<int>(modes_.size()); }
    const ModeShape& mode(int j) const { return modes_.at(j); }  // 0-based
    const std::vector<ModeShape>& modes() const { return modes_; }
    const ModalConstants& constants() const { return consts_; }

    double shape(int j, double x, int order = 0) const { return modes_.at(j).eval(x, order); }
    double tip_value(int j) const { return tip_values_.at(j); }  ///< phi_j(l)

private:
    BeamParams beam_;
    BasisOptions opts_;
    std::vector<ModeShape> modes_;
    std::vector<double> tip_values_;
    ModalConstants consts_;
};

} // namespace flexlink
