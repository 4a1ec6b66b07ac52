#include "snosc/floquet.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace snosc {

const char* to_string(Classification c) {
    switch (c) {
        case Classification::stable: return "Stable";
        case Classification::marginal: return "Marginal";
        case Classification::unstable: return "Unstable";
    }
    return "?";
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::domain_error("eigenvalues: square matrix required");
    if (!a.allFinite()) throw std::domain_error("eigenvalues: non-finite entries");
    const Eigen::Index n = a.rows();

    if (n == 2) {
        // quadratic formula on (trace, det); exact conjugate pairing
        const double tr = a(0, 0) + a(1, 1);
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double disc = tr * tr / 4.0 - det;
        if (disc >= 0.0) {
            const double r = std::sqrt(disc);
            return {tr / 2.0 + r, tr / 2.0 - r};
        }
        const double im = std::sqrt(-disc);
        return {{tr / 2.0, im}, {tr / 2.0, -im}};
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(a);
    std::vector<std::complex<double>> out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = solver.eigenvalues()[i];
    // canonical order: descending modulus, positive imaginary part first
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        const double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        return x.imag() > y.imag();
    });
    return out;
}

namespace {

/// Geometric multiplicity of eigenvalue v: n - rank(A - v I), rank from
/// singular values relative to ||A||.
int geometric_multiplicity(const Eigen::MatrixXd& a, std::complex<double> v, double scale) {
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd shifted = a.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < n; ++i) shifted(i, i) -= v;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    int rank = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (svd.singularValues()[i] > tol::rank * scale) ++rank;
    return static_cast<int>(n) - rank;
}

}  // namespace

StabilityReport classify_stability(const Eigen::MatrixXd& monodromy) {
    StabilityReport rep;
    rep.eigenvalues = eigenvalues(monodromy);
    rep.moduli.resize(rep.eigenvalues.size());
    rep.spectral_radius = 0.0;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        rep.moduli[i] = std::abs(rep.eigenvalues[i]);
        rep.spectral_radius = std::max(rep.spectral_radius, rep.moduli[i]);
    }

    if (rep.spectral_radius > 1.0 + tol::unit) {
        rep.classification = Classification::unstable;
    } else if (rep.spectral_radius < 1.0 - tol::unit) {
        rep.classification = Classification::stable;
    } else {
        rep.classification = Classification::marginal;
    }

    // semisimplicity of the unit-modulus eigenvalues: cluster coincident ones
    // and compare the cluster size with the rank deficiency of (A - v I)
    rep.semisimple_boundary = true;
    if (rep.classification == Classification::marginal) {
        const double scale = std::max(1.0, monodromy.cwiseAbs().rowwise().sum().maxCoeff());
        std::vector<bool> used(rep.eigenvalues.size(), false);
        for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
            if (used[i] || std::abs(rep.moduli[i] - 1.0) > tol::unit) continue;
            int algebraic = 0;
            std::complex<double> v = rep.eigenvalues[i];
            for (std::size_t j = 0; j < rep.eigenvalues.size(); ++j) {
                if (std::abs(rep.eigenvalues[j] - v) <= tol::eq * scale) {
                    ++algebraic;
                    used[j] = true;
                }
            }
            if (geometric_multiplicity(monodromy, v, scale) < algebraic) {
                rep.semisimple_boundary = false;
            }
        }
    }
    return rep;
}

CovarianceState fixed_point_covariance(const SegmentPropagator& cycle) {
    const StabilityReport rep = classify_stability(cycle.matrix_m);
    if (rep.spectral_radius >= 1.0 - tol::unit) {
        throw NoFixedPointError("fixed_point_covariance: spectral radius " +
                                    std::to_string(rep.spectral_radius) +
                                    " is not a strict contraction",
                                rep);
    }
    const Eigen::Matrix3d lhs = Eigen::Matrix3d::Identity() - cycle.matrix_m;
    const Eigen::Vector3d x = Eigen::PartialPivLU<Eigen::Matrix3d>(lhs).solve(cycle.drive_d);
    return CovarianceState::from_vec(x);
}

Eigen::Matrix3d neumann_partial_sum(const Eigen::Matrix3d& x, int n) {
    if (n < 1) throw std::domain_error("neumann_partial_sum: n >= 1 required");
    Eigen::Matrix3d power = x;
    Eigen::Matrix3d sum = x;
    for (int j = 2; j <= n; ++j) {
        power = (power * x).eval();
        sum += power;
    }
    return sum;
}

}  // namespace snosc
