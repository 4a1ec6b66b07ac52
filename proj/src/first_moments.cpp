#include "snosc/first_moments.hpp"

#include <cmath>
#include <stdexcept>

#include "snosc/expm.hpp"

namespace snosc {

Eigen::Matrix2d build_a(double mass, double omega_eff, double gamma_m) {
    if (!(mass > 0.0)) throw std::domain_error("build_a: mass must be > 0");
    Eigen::Matrix2d a;
    a << 0.0, 1.0 / mass,
        -mass * omega_eff * omega_eff, -gamma_m;
    return a;
}

namespace {

Eigen::Matrix2d expm2(const Eigen::Matrix2d& a, double t) {
    return expm(Eigen::MatrixXd(a), t);
}

}  // namespace

Eigen::Matrix2d first_moment_cycle(const PhysicalParams& p, const ModulationSchedule& s) {
    const Eigen::Matrix2d a1 = build_a(p.M, p.omega, p.gamma_m);
    const Eigen::Matrix2d a2 = build_a(p.M, s.beta * p.omega, p.gamma_m);
    return expm2(a2, s.t2) * expm2(a1, s.t1);
}

std::pair<std::complex<double>, std::complex<double>>
analytic_eigenvalues_gamma0(double alpha, double beta) {
    using cd = std::complex<double>;
    const double s = std::abs(std::sin(alpha));
    const double c2a = std::cos(2.0 * alpha);
    const double bp1 = beta + 1.0;
    const cd root = std::sqrt(cd(-2.0 * bp1 * bp1 * c2a + 2.0 * (beta - 6.0) * beta + 2.0, 0.0));
    const double sin2 = std::sin(alpha) * std::sin(alpha);
    const double cos2 = std::cos(alpha) * std::cos(alpha);
    const cd lambda1 =
        (-2.0 * (beta * beta + 1.0) * sin2 + 4.0 * beta * cos2 + bp1 * root * s) / (4.0 * beta);
    const cd lambda2 =
        -(-bp1 * bp1 * c2a + bp1 * root * s + (beta - 1.0) * (beta - 1.0)) / (4.0 * beta);
    return {lambda1, lambda2};
}

std::vector<MeanSeriesRow> propagate_first_moments(const MeanState& mean0,
                                                   const PhysicalParams& p,
                                                   const ModulationSchedule& s,
                                                   int n_cycles, int substeps_per_segment) {
    if (n_cycles < 0) throw std::domain_error("propagate_first_moments: n_cycles >= 0");
    if (substeps_per_segment < 1)
        throw std::domain_error("propagate_first_moments: substeps >= 1");
    const int sub = substeps_per_segment;

    Eigen::Matrix2d seg_m[2], sub_m[2];
    for (int i = 0; i < 2; ++i) {
        const double w = i == 0 ? p.omega : s.beta * p.omega;
        const double len = i == 0 ? s.t1 : s.t2;
        const Eigen::Matrix2d a = build_a(p.M, w, p.gamma_m);
        seg_m[i] = expm2(a, len);
        sub_m[i] = expm2(a, len / sub);
    }

    std::vector<MeanSeriesRow> rows;
    rows.reserve(static_cast<std::size_t>(n_cycles) * 2 * sub + 1);
    Eigen::Vector2d y = mean0.vec();
    rows.push_back({0.0, mean0, false});
    for (int n = 0; n < n_cycles; ++n) {
        for (int seg = 0; seg < 2; ++seg) {
            const double t0 = n * s.tau + (seg == 0 ? 0.0 : s.t1);
            const double len = seg == 0 ? s.t1 : s.t2;
            const Eigen::Vector2d y0 = y;
            for (int k = 1; k <= sub; ++k) {
                y = k < sub ? Eigen::Vector2d(sub_m[seg] * y) : Eigen::Vector2d(seg_m[seg] * y0);
                rows.push_back({t0 + k * (len / sub), MeanState::from_vec(y), false});
            }
        }
    }
    // flag local maxima of |x|
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const double a = std::abs(rows[i - 1].mean.x_mean);
        const double b = std::abs(rows[i].mean.x_mean);
        const double c = std::abs(rows[i + 1].mean.x_mean);
        if (b > a && b >= c) rows[i].at_local_max = true;
    }
    return rows;
}

std::optional<double> trap_exit_time(const PhysicalParams& p, const ModulationSchedule& s,
                                     const MeanState& mean0, double trap_halfwidth,
                                     double t_max, int substeps_per_segment) {
    if (!(trap_halfwidth > 0.0)) throw std::domain_error("trap_exit_time: trap_halfwidth > 0");
    if (!(t_max > 0.0)) throw std::domain_error("trap_exit_time: t_max > 0");
    const int sub = substeps_per_segment;

    Eigen::Matrix2d seg_m[2], sub_m[2];
    for (int i = 0; i < 2; ++i) {
        const double w = i == 0 ? p.omega : s.beta * p.omega;
        const double len = i == 0 ? s.t1 : s.t2;
        const Eigen::Matrix2d a = build_a(p.M, w, p.gamma_m);
        seg_m[i] = expm2(a, len);
        sub_m[i] = expm2(a, len / sub);
    }

    Eigen::Vector2d y = mean0.vec();
    if (std::abs(y[0]) > trap_halfwidth) return 0.0;
    for (int n = 0; n * s.tau < t_max; ++n) {
        for (int seg = 0; seg < 2; ++seg) {
            const double t0 = n * s.tau + (seg == 0 ? 0.0 : s.t1);
            const double len = seg == 0 ? s.t1 : s.t2;
            const Eigen::Vector2d y0 = y;
            for (int k = 1; k <= sub; ++k) {
                y = k < sub ? Eigen::Vector2d(sub_m[seg] * y) : Eigen::Vector2d(seg_m[seg] * y0);
                if (std::abs(y[0]) > trap_halfwidth) return t0 + k * (len / sub);
            }
        }
    }
    return std::nullopt;
}

}  // namespace snosc
