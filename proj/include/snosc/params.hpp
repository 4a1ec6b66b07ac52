#pragma once

#include <cmath>
#include <string>

#include "snosc/moments.hpp"

namespace snosc {

namespace consts {
// CODATA 2018 values, SI.
inline constexpr double hbar_si = 1.054571817e-34;       // [J s]
inline constexpr double k_boltzmann_si = 1.380649e-23;   // [J/K]
inline constexpr double g_newton_si = 6.674e-11;         // [m^3/(kg s^2)]
}  // namespace consts

enum class UnitMode { si, dimensionless };

/// Physical parameters of the levitated oscillator. Immutable after
/// validation; all fields SI unless unit_mode == dimensionless, in which case
/// hbar = M = omega = 1 exactly.
struct PhysicalParams {
    double M = 0.0;           // oscillator mass [kg]
    double omega = 0.0;       // trap angular frequency [rad/s]
    double gamma_m = 0.0;     // momentum damping rate [1/s]
    double T_bath = 0.0;      // bath temperature [K]
    double m_atom = 0.0;      // constituent atomic mass [kg]; 0 = unset
    double delta_x_zp = 0.0;  // internal zero-point spread [m]; 0 = unset
    double omega_sn = 0.0;    // self-gravity frequency [rad/s]
    double hbar = consts::hbar_si;
    double k_B = consts::k_boltzmann_si;
    double G_newton = consts::g_newton_si;
    UnitMode unit_mode = UnitMode::si;

    /// Throws std::domain_error naming the offending field.
    void validate() const;

    /// Effective frequency of the covariance dynamics for a given trap
    /// frequency segment value.
    double omega_q(double omega_t) const {
        return std::sqrt(omega_t * omega_t + omega_sn * omega_sn);
    }

    double thermal_drive() const { return 2.0 * M * gamma_m * k_B * T_bath; }
};

/// Self-gravity frequency for a crystalline mass distribution with Gaussian
/// spread delta_x_zp around the lattice sites.
double compute_omega_sn(double g_newton, double m_atom, double delta_x_zp);

/// Square-wave modulation: omega_t = omega on [n*tau, n*tau + t1),
/// beta*omega on [n*tau + t1, (n+1)*tau).
struct ModulationSchedule {
    double alpha = 0.0;  // phase swept per segment at the damped frequency
    double beta = 0.0;   // frequency ratio of the second segment
    double t1 = 0.0;     // [s]
    double t2 = 0.0;     // [s]
    double tau = 0.0;    // period t1 + t2 [s]
};

/// t_i = alpha / sqrt(omega_i^2 - gamma_m^2/4); throws std::domain_error
/// naming the overdamped segment when a radicand is not positive.
ModulationSchedule schedule_times(double alpha, double beta, double omega, double gamma_m);

inline ModulationSchedule make_schedule(const PhysicalParams& p, double alpha, double beta) {
    return schedule_times(alpha, beta, p.omega, p.gamma_m);
}

struct InitialConditions {
    MeanState mean0;
    CovarianceState cov0;
    double trap_halfwidth = 1e-3;  // [m]

    /// Checks that cov0 is a valid Gaussian state: nonnegative variances and
    /// V_xx*V_pp - V_xp^2 >= hbar^2/4 (up to rounding slack).
    void validate(const PhysicalParams& p) const;
};

/// Ground state of the bare trap: V_xx = hbar/(2 M omega), V_pp = hbar M omega / 2.
CovarianceState ground_state_covariance(const PhysicalParams& p);

}  // namespace snosc
