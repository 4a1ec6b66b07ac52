#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "snosc/propagator.hpp"

namespace snosc {

namespace tol {
inline constexpr double unit = 1e-9;  // |v| = 1 boundary, relative
inline constexpr double eq = 1e-8;    // eigenvalue coincidence
inline constexpr double rank = 1e-8;  // rank decisions, relative to ||A||
}  // namespace tol

enum class Classification { stable, marginal, unstable };

const char* to_string(Classification c);

/// Floquet multiplier report for a monodromy matrix. Stable means all
/// |v_j| < 1 - tol (strict contraction, so the driven system converges);
/// Unstable means some |v_j| > 1 + tol; Marginal is the boundary band, with
/// semisimple_boundary telling whether every unit-modulus eigenvalue has
/// matching algebraic and geometric multiplicity (bounded orbits).
struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;
    std::vector<double> moduli;
    Classification classification = Classification::stable;
    bool semisimple_boundary = true;
    double spectral_radius = 0.0;
};

/// Eigenvalues of a small (n <= 4) real matrix; complex-conjugate pairing is
/// enforced for real input. 2x2 matrices use the closed quadratic form.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a);

StabilityReport classify_stability(const Eigen::MatrixXd& monodromy);

struct NoFixedPointError : std::runtime_error {
    NoFixedPointError(const std::string& what, StabilityReport rep)
        : std::runtime_error(what), report(std::move(rep)) {}
    StabilityReport report;
};

/// Unique fixed point x* = (I - M)^{-1} d of a strictly contracting per-cycle
/// affine map; the Neumann-series limit of iterating the map. Throws
/// NoFixedPointError (carrying the stability report) if the spectral radius
/// is not < 1 - tol::unit.
CovarianceState fixed_point_covariance(const SegmentPropagator& cycle);

/// Partial sum sum_{j=1..n} X^j by iterated multiply-accumulate.
Eigen::Matrix3d neumann_partial_sum(const Eigen::Matrix3d& x, int n);

}  // namespace snosc
