#pragma once

#include <Eigen/Core>

namespace snosc {

/// Matrix exponential e^{A t} by scaling-and-squaring with a truncated Taylor
/// series. Intended for the small dense generators of this project (n <= 8,
/// ||A t|| up to ~1e3). Throws std::domain_error on non-finite input.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a, double t = 1.0);

/// Affine segment solution for xdot = P x + c with constant c:
///   x(t) = m * x(0) + d,  m = e^{P t},  d = int_0^t e^{P(t-s)} c ds.
/// Computed through the augmented generator [[P, c], [0, 0]], which stays
/// accurate as gamma -> 0 where P becomes singular.
struct AffineMap3 {
    Eigen::Matrix3d m;
    Eigen::Vector3d d;
};
AffineMap3 expm_affine(const Eigen::Matrix3d& p, const Eigen::Vector3d& c, double t);

}  // namespace snosc
