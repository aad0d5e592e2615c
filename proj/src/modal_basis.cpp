#include "flexlink/modal_basis.hpp"
#include "flexlink/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace flexlink {

namespace {

double characteristic(double x) { return std::cos(x) * std::cosh(x) + 1.0; }
double characteristic_deriv(double x) {
    return std::cos(x) * std::sinh(x) - std::sin(x) * std::cosh(x);
}

} // namespace

void BeamParams::validate() const {
    std::ostringstream msg;
    if (!(length > 0.0)) msg << "beam length must be > 0; ";
    if (!(area > 0.0)) msg << "cross section area must be > 0; ";
    if (!(density > 0.0)) msg << "density must be > 0; ";
    if (!(flexural_rigidity > 0.0)) msg << "flexural rigidity EI must be > 0; ";
    if (!(joint_inertia >= 0.0)) msg << "joint inertia must be >= 0; ";
    if (!(gravity >= 0.0)) msg << "gravity magnitude must be >= 0; ";
    if (mode_count < 1) msg << "mode count must be >= 1; ";
    const std::string s = msg.str();
    if (!s.empty()) throw ConfigError("invalid beam parameters: " + s);
}

std::vector<double> solve_characteristic_roots(int count, double tol) {
    if (count < 1) throw ConfigError("mode count must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("root tolerance must be > 0");

    constexpr double pi = std::numbers::pi;
    std::vector<double> roots;
    roots.reserve(count);
    for (int j = 1; j <= count; ++j) {
        // One sign change per bracket: f > 0 at the left edge, < 0 at the right for odd j,
        // and vice versa for even j (cosh dominates once x > pi/2).
        double lo = (j - 1) * pi + 1e-12;
        double hi = j * pi;
        double flo = characteristic(lo);
        double fhi = characteristic(hi);
        if (flo * fhi > 0.0) {
            std::ostringstream msg;
            msg << "characteristic root bracketing failed on [" << lo << ", " << hi
                << "]: f(lo)=" << flo << ", f(hi)=" << fhi;
            throw NumericError(msg.str());
        }
        // Bisect to a loose interval, then polish with safeguarded Newton.
        for (int it = 0; it < 200 && (hi - lo) > 1e-6; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = characteristic(mid);
            if (flo * fm <= 0.0) {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        double x = 0.5 * (lo + hi);
        for (int it = 0; it < 60; ++it) {
            const double f = characteristic(x);
            const double df = characteristic_deriv(x);
            double step = (df != 0.0) ? f / df : 0.0;
            double next = x - step;
            if (!(next > lo && next < hi) || df == 0.0) {
                next = 0.5 * (lo + hi);  // fall back to bisection inside the bracket
                step = x - next;
            }
            const double fn = characteristic(next);
            if (flo * fn <= 0.0) {
                hi = next;
            } else {
                lo = next;
                flo = fn;
            }
            x = next;
            if (std::abs(step) < tol) break;
        }
        roots.push_back(x);
    }
    return roots;
}

double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / panels;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < panels; i += 2) odd += f(a + i * h);
    for (int i = 2; i < panels; i += 2) even += f(a + i * h);
    return (h / 3.0) * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double ModeShape::eval(double x, int order) const {
    if (x < 0.0 || x > length) {
        std::ostringstream msg;
        msg << "mode shape argument " << x << " outside [0, " << length << "]";
        throw std::domain_error(msg.str());
    }
    if (order < 0 || order > 3) throw std::domain_error("derivative order must be 0..3");

    const double b = root / length;
    const double u = b * x;
    // sigma - 1 computed without cancellation; for high modes sigma -> 1 and the
    // naive cosh/sinh difference loses all precision near the free end.
    const double sm1 =
        (std::exp(-root) + std::cos(root) - std::sin(root)) / (std::sinh(root) + std::sin(root));
    const double ep = std::exp(u);
    const double em = std::exp(-u);
    // cosh(u) - sigma sinh(u) and sinh(u) - sigma cosh(u) via the stable forms.
    const double ch = 0.5 * (-sm1 * ep + (2.0 + sm1) * em);
    const double sh = 0.5 * (-sm1 * ep - (2.0 + sm1) * em);
    const double c = std::cos(u);
    const double s = std::sin(u);

    double v = 0.0;
    switch (order) {
        case 0: v = ch - c + sigma * s; break;
        case 1: v = b * (sh + s + sigma * c); break;
        case 2: v = b * b * (ch + c - sigma * s); break;
        case 3: v = b * b * b * (sh - s - sigma * c); break;
    }
    return scale * v;
}

namespace {

ModalConstants compute_constants(const BeamParams& beam, std::vector<ModeShape>& modes,
                                 const BasisOptions& opts) {
    const double l = beam.length;
    const double rho_a = beam.linear_density();
    const int nu = static_cast<int>(modes.size());

    // Normalize each mode so that int phi^2 = l, using the configured quadrature.
    for (auto& m : modes) {
        m.scale = 1.0;
        const double raw = simpson([&](double x) { return m.eval(x) * m.eval(x); }, 0.0, l,
                                   opts.quad_panels);
        if (!(raw > 0.0) || !std::isfinite(raw))
            throw NumericError("mode normalization integral is not positive");
        m.scale = std::sqrt(l / raw);
    }

    ModalConstants k;
    k.a0.resize(nu);
    k.a1.resize(nu);
    k.a2.resize(nu);
    k.a3.resize(nu);
    for (int j = 0; j < nu; ++j) {
        const ModeShape& m = modes[j];
        auto integrate = [&](auto&& f) {
            const double full = simpson(f, 0.0, l, opts.quad_panels);
            const double half = simpson(f, 0.0, l, opts.quad_panels / 2);
            if (std::abs(full - half) > opts.quad_tol * std::max(1.0, std::abs(full))) {
                std::ostringstream msg;
                msg << "quadrature not converged for mode " << m.index << ": |delta|="
                    << std::abs(full - half) << " at " << opts.quad_panels << " panels";
                throw NumericError(msg.str());
            }
            return full;
        };
        k.a0[j] = l;  // exact under the chosen normalization
        k.a1[j] = integrate([&](double x) { return m.eval(x) * x; });
        k.a2[j] = integrate([&](double x) { return m.eval(x); });
        k.a3[j] = integrate([&](double x) {
            const double d2 = m.eval(x, 2);
            return d2 * d2;
        });
        if (!(k.a3[j] > 0.0)) throw NumericError("a3 must be positive");
    }

    k.b0.resize(nu);
    k.b1.resize(nu);
    k.b2.resize(nu);
    k.b3.resize(nu);
    k.b5.resize(nu);
    k.b6.resize(nu);
    k.b7.resize(nu);
    for (int j = 0; j < nu; ++j) {
        k.b0[j] = rho_a * k.a0[j];
        k.b1[j] = rho_a * k.a1[j] * k.a1[j] / k.a0[j];
        k.b2[j] = rho_a * k.a1[j];
        k.b3[j] = k.a1[j] / k.a0[j];
        k.b5[j] = rho_a * k.a2[j];
        k.b6[j] = beam.flexural_rigidity * k.a3[j];
        k.b7[j] = k.a2[j] / k.a0[j];
    }
    k.b4 = rho_a * l * l / 2.0;
    k.b8 = beam.joint_inertia;
    k.rigid_inertia = rho_a * l * l * l / 3.0;
    return k;
}

} // namespace

ModalBasis::ModalBasis(const BeamParams& beam, const BasisOptions& opts)
    : beam_(beam), opts_(opts) {
    beam_.validate();
    if (opts_.quad_panels < 8) throw ConfigError("quadrature panel count must be >= 8");

    const auto roots = solve_characteristic_roots(beam_.mode_count, opts_.root_tol);
    modes_.reserve(roots.size());
    for (int j = 0; j < beam_.mode_count; ++j) {
        ModeShape m;
        m.index = j + 1;
        m.root = roots[j];
        m.sigma = (std::cosh(m.root) + std::cos(m.root)) / (std::sinh(m.root) + std::sin(m.root));
        m.length = beam_.length;
        modes_.push_back(m);
    }
    consts_ = compute_constants(beam_, modes_, opts_);
    tip_values_.reserve(modes_.size());
    for (const auto& m : modes_) tip_values_.push_back(m.eval(beam_.length));
}

} // namespace flexlink
