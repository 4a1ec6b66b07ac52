#include "snosc/params.hpp"

#include <cmath>
#include <stdexcept>

namespace snosc {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

}  // namespace

void PhysicalParams::validate() const {
    require(std::isfinite(M) && M > 0.0, "params.M must be > 0");
    require(std::isfinite(omega) && omega > 0.0, "params.omega must be > 0");
    require(std::isfinite(gamma_m) && gamma_m >= 0.0, "params.gamma_m must be >= 0");
    require(std::isfinite(T_bath) && T_bath >= 0.0, "params.T_bath must be >= 0");
    require(std::isfinite(omega_sn) && omega_sn >= 0.0, "params.omega_sn must be >= 0");
    require(m_atom >= 0.0, "params.m_atom must be >= 0");
    require(delta_x_zp >= 0.0, "params.delta_x_zp must be >= 0");
    require(hbar > 0.0, "params.hbar must be > 0");
    require(k_B > 0.0, "params.k_B must be > 0");
    require(G_newton > 0.0, "params.G_newton must be > 0");
    // underdamped: real segment times need omega^2 > gamma^2/4
    require(omega * omega > gamma_m * gamma_m / 4.0,
            "params: overdamped (omega^2 <= gamma_m^2/4)");
    if (unit_mode == UnitMode::dimensionless) {
        require(hbar == 1.0 && M == 1.0 && omega == 1.0,
                "params: dimensionless mode requires hbar = M = omega = 1 exactly");
    }
}

double compute_omega_sn(double g_newton, double m_atom, double delta_x_zp) {
    require(g_newton > 0.0, "compute_omega_sn: G_newton must be > 0");
    require(m_atom > 0.0, "compute_omega_sn: m_atom must be > 0");
    require(delta_x_zp > 0.0, "compute_omega_sn: delta_x_zp must be > 0");
    const double dx3 = delta_x_zp * delta_x_zp * delta_x_zp;
    return std::sqrt(g_newton * m_atom / (6.0 * std::sqrt(M_PI) * dx3));
}

ModulationSchedule schedule_times(double alpha, double beta, double omega, double gamma_m) {
    require(alpha > 0.0, "schedule.alpha must be > 0");
    require(beta > 0.0, "schedule.beta must be > 0");
    const double g2 = gamma_m * gamma_m / 4.0;
    const double r1 = omega * omega - g2;
    if (r1 <= 0.0)
        throw std::domain_error("schedule: segment 1 overdamped (omega^2 <= gamma_m^2/4)");
    const double r2 = beta * beta * omega * omega - g2;
    if (r2 <= 0.0)
        throw std::domain_error("schedule: segment 2 overdamped (beta^2 omega^2 <= gamma_m^2/4)");
    ModulationSchedule s;
    s.alpha = alpha;
    s.beta = beta;
    s.t1 = alpha / std::sqrt(r1);
    s.t2 = alpha / std::sqrt(r2);
    s.tau = s.t1 + s.t2;
    return s;
}

void InitialConditions::validate(const PhysicalParams& p) const {
    require(std::isfinite(mean0.x_mean) && std::isfinite(mean0.p_mean),
            "initial.mean0 must be finite");
    require(cov0.v_xx >= 0.0, "initial.cov0.v_xx must be >= 0");
    require(cov0.v_pp >= 0.0, "initial.cov0.v_pp must be >= 0");
    const double det = cov0.symplectic_det();
    const double bound = p.hbar * p.hbar / 4.0;
    // rounding slack: ground-state products hit the bound only up to ulps
    require(det >= bound * (1.0 - 1e-9),
            "initial.cov0 violates V_xx*V_pp - V_xp^2 >= hbar^2/4");
    require(trap_halfwidth > 0.0, "initial.trap_halfwidth must be > 0");
}

CovarianceState ground_state_covariance(const PhysicalParams& p) {
    return {p.hbar / (2.0 * p.M * p.omega), 0.0, p.hbar * p.M * p.omega / 2.0};
}

}  // namespace snosc
