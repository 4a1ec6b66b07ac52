#include "snosc/greens.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace snosc {

GreensPair make_greens(double mass, double omega_seg, double gamma_m) {
    if (!(mass > 0.0)) throw std::domain_error("greens: mass must be > 0");
    if (!(omega_seg > 0.0)) throw std::domain_error("greens: omega_seg must be > 0");
    GreensPair g;
    g.mass = mass;
    g.omega = omega_seg;
    g.gamma_m = gamma_m;
    const std::complex<double> disc(gamma_m * gamma_m - 4.0 * omega_seg * omega_seg, 0.0);
    const std::complex<double> root = std::sqrt(disc);
    g.gamma_plus = -gamma_m / 2.0 + 0.5 * root;
    g.gamma_minus = -gamma_m / 2.0 - 0.5 * root;
    return g;
}

GreensSample eval_greens(const PhysicalParams& p, double omega_seg, double t) {
    if (t < 0.0) throw std::domain_error("eval_greens: t must be >= 0");
    const GreensPair g = make_greens(p.M, omega_seg, p.gamma_m);
    using cd = std::complex<double>;
    const cd root = g.gamma_plus - g.gamma_minus;  // sqrt(gamma^2 - 4 w^2)
    const cd ep = std::exp(t * g.gamma_plus);
    const cd em = std::exp(t * g.gamma_minus);
    const cd g1 = (p.gamma_m * (ep - em) + root * (ep + em)) / (2.0 * root);
    const cd g2 = (ep - em) / (p.M * root);
    const cd g1d = (p.gamma_m * (g.gamma_plus * ep - g.gamma_minus * em) +
                    root * (g.gamma_plus * ep + g.gamma_minus * em)) /
                   (2.0 * root);
    const cd g2d = (g.gamma_plus * ep - g.gamma_minus * em) / (p.M * root);

    const double mag = std::max({std::abs(g1), std::abs(g2) * p.M * omega_seg, 1e-300});
    if (std::abs(g1.imag()) > 1e-12 * mag || std::abs(g2.imag()) * p.M * omega_seg > 1e-12 * mag)
        throw std::runtime_error("eval_greens: imaginary parts failed to cancel");
    return {g1.real(), g2.real(), g1d.real(), g2d.real()};
}

namespace {

// adaptive Simpson with absolute tolerance, one level of work-splitting per call
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double abs_tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0) {
        if (std::abs(err) > abs_tol)
            throw std::runtime_error("thermal_integrals: quadrature failed to converge; estimate " +
                                     std::to_string(left + right + err));
        return left + right + err;
    }
    if (std::abs(err) <= abs_tol) return left + right + err;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1);
}

/// Integrates f over [0, t] in period-sized chunks so the recursion stays
/// shallow for long, oscillatory ranges.
double integrate(const std::function<double(double)>& f, double t, double omega_seg,
                 double abs_tol) {
    if (t <= 0.0) return 0.0;
    const double chunk_len = M_PI / omega_seg;
    const int n_chunks = std::max(1, static_cast<int>(std::ceil(t / chunk_len)));
    const double h = t / n_chunks;
    double total = 0.0;
    const double tol_per_chunk = abs_tol / n_chunks;
    for (int i = 0; i < n_chunks; ++i) {
        const double a = i * h, b = (i + 1) * h;
        const double m = 0.5 * (a + b);
        const double fa = f(a), fm = f(m), fb = f(b);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(f, a, b, fa, fm, fb, whole, tol_per_chunk, 28);
    }
    return total;
}

}  // namespace

ThermalIntegrals thermal_integrals(const PhysicalParams& p, double omega_seg, double t) {
    if (t < 0.0) throw std::domain_error("thermal_integrals: t must be >= 0");
    ThermalIntegrals out;
    if (t == 0.0 || p.gamma_m == 0.0 || p.T_bath == 0.0) return out;

    const double drive = p.thermal_drive();  // 2 M gamma k_B T
    // natural scale of the equilibrium answer sets the absolute tolerance
    const double scale = p.k_B * p.T_bath / (p.M * omega_seg * omega_seg);
    const double abs_tol = 1e-12 * scale;

    auto g2 = [&](double s) { return eval_greens(p, omega_seg, s).g2; };
    auto pg2 = [&](double s) { return p.M * eval_greens(p, omega_seg, s).g2_dot; };

    out.i_xx = drive * integrate([&](double s) { const double v = g2(s); return v * v; },
                                 t, omega_seg, abs_tol);
    out.i_xp = drive * integrate([&](double s) { return g2(s) * pg2(s); },
                                 t, omega_seg, abs_tol * p.M * omega_seg);
    out.i_pp = drive * integrate([&](double s) { const double v = pg2(s); return v * v; },
                                 t, omega_seg, abs_tol * p.M * p.M * omega_seg * omega_seg);
    return out;
}

}  // namespace snosc
