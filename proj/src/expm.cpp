#include "snosc/expm.hpp"

#include <cmath>
#include <stdexcept>

namespace snosc {

namespace {

/// Power-of-two diagonal balancing: returns d with row/column norms of
/// D^{-1} A D roughly equal. Exact in floating point, so it costs no
/// accuracy; it removes the norm inflation of generators with mixed scales
/// (entries like M w^2 against 1/M) and with it several squaring stages.
Eigen::VectorXd balance_scales(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
    for (int pass = 0; pass < 8; ++pass) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            double row = 0.0, col = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                row += std::abs(a(i, j) * d[j] / d[i]);
                col += std::abs(a(j, i) * d[i] / d[j]);
            }
            if (row == 0.0 || col == 0.0) continue;
            const int e = static_cast<int>(std::lround(std::log2(col / row) / 2.0));
            if (e != 0) {
                d[i] = std::ldexp(d[i], -e);
                changed = true;
            }
        }
        if (!changed) break;
    }
    return d;
}

}  // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double t) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) throw std::domain_error("expm: matrix must be square");
    if (n > 8) throw std::domain_error("expm: n <= 8 only");
    Eigen::MatrixXd b = a * t;
    if (!b.allFinite()) throw std::domain_error("expm: non-finite entries");

    const Eigen::VectorXd d = balance_scales(b);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) b(i, j) *= d[j] / d[i];

    // scale so ||B|| <= 1/2, exponentiate by Taylor, square back up
    const double norm = b.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        b /= std::ldexp(1.0, squarings);
    }

    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    for (int k = 1; k <= 40; ++k) {
        term = (term * b / static_cast<double>(k)).eval();
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18 * result.cwiseAbs().maxCoeff()) break;
    }
    for (int k = 0; k < squarings; ++k) result = (result * result).eval();

    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) result(i, j) *= d[i] / d[j];
    return result;
}

AffineMap3 expm_affine(const Eigen::Matrix3d& p, const Eigen::Vector3d& c, double t) {
    Eigen::Matrix4d aug = Eigen::Matrix4d::Zero();
    aug.topLeftCorner<3, 3>() = p;
    aug.topRightCorner<3, 1>() = c;
    const Eigen::MatrixXd e = expm(aug, t);
    AffineMap3 map;
    map.m = e.topLeftCorner<3, 3>();
    map.d = e.topRightCorner<3, 1>();
    return map;
}

}  // namespace snosc
