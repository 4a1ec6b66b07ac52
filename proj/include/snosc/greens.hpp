#pragma once

#include <complex>

#include "snosc/params.hpp"

namespace snosc {

/// Green's functions of xddot + gamma xdot + w^2 x = F/M on one
/// constant-frequency segment, solved via the characteristic rates
///   Gamma_pm = -gamma/2 +- (1/2) sqrt(gamma^2 - 4 w^2).
/// Complex arithmetic internally; the boundary values are real for real
/// parameters. This module is a cross-check oracle for the W-block
/// propagation, not the production path.
struct GreensPair {
    double mass = 0.0;
    double omega = 0.0;
    double gamma_m = 0.0;
    std::complex<double> gamma_plus;
    std::complex<double> gamma_minus;
};

GreensPair make_greens(double mass, double omega_seg, double gamma_m);

struct GreensSample {
    double g1 = 0.0;      // position response to x0,      G1(0) = 1
    double g2 = 0.0;      // position response to p0,      G2(0) = 0
    double g1_dot = 0.0;  // d/dt G1,                      G1'(0) = 0
    double g2_dot = 0.0;  // d/dt G2,                      G2'(0) = 1/M
};

GreensSample eval_greens(const PhysicalParams& p, double omega_seg, double t);

/// Thermal-noise integrals of the stochastic-mean covariance built from the
/// momentum impulse response M*G2'(s):
///   I_xx = 2 M gamma k_B T int_0^t G2(s)^2 ds            = W_xx(t)
///   I_xp = 2 M gamma k_B T int_0^t G2(s) M G2'(s) ds     = W_xp(t)
///   I_pp = 2 M gamma k_B T int_0^t (M G2'(s))^2 ds       = W_pp(t)
/// starting from zero covariance. Adaptive quadrature; throws
/// std::runtime_error (with the achieved estimate in the message) if the
/// tolerance cannot be met.
struct ThermalIntegrals {
    double i_xx = 0.0;
    double i_xp = 0.0;
    double i_pp = 0.0;
};

ThermalIntegrals thermal_integrals(const PhysicalParams& p, double omega_seg, double t);

}  // namespace snosc
