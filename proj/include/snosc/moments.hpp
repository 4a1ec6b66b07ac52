#pragma once

#include <Eigen/Core>

namespace snosc {

/// First moments of the oscillator state: mean position and momentum.
struct MeanState {
    double x_mean = 0.0;  // [m]
    double p_mean = 0.0;  // [kg m/s]

    Eigen::Vector2d vec() const { return {x_mean, p_mean}; }
    static MeanState from_vec(const Eigen::Vector2d& v) { return {v[0], v[1]}; }
};

/// Second-moment vector (V_xx, V_xp, V_pp). V_xp is the symmetrized
/// cross-covariance. Also used for the companion covariance W of the
/// noise-driven mean.
struct CovarianceState {
    double v_xx = 0.0;  // [m^2]
    double v_xp = 0.0;  // [kg m^2/s]
    double v_pp = 0.0;  // [kg^2 m^2/s^2]

    Eigen::Vector3d vec() const { return {v_xx, v_xp, v_pp}; }
    static CovarianceState from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

    /// Symplectic invariant V_xx*V_pp - V_xp^2 (conserved for gamma_m = 0).
    double symplectic_det() const { return v_xx * v_pp - v_xp * v_xp; }

    CovarianceState operator+(const CovarianceState& o) const {
        return {v_xx + o.v_xx, v_xp + o.v_xp, v_pp + o.v_pp};
    }
};

/// The two-block decomposition of the observable second moments.
///
/// `quantum` is the covariance of the fluctuations about the mean; it evolves
/// homogeneously at the effective frequency omega_q = sqrt(omega_t^2 +
/// omega_sn^2). `classical` (the W block) is the covariance of the stochastic
/// mean, driven by thermal noise at the bare trap frequency omega_t. The
/// observable covariance is the componentwise sum, and the F terms of the
/// driven moment equations are exactly F_xp = W_xx, F_pp = W_xp.
struct SecondMomentSystem {
    CovarianceState quantum;
    CovarianceState classical;

    CovarianceState total() const { return quantum + classical; }
};

}  // namespace snosc
