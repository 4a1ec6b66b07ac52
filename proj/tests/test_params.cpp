#include <cmath>
#include <random>

#include "doctest.h"

#include "snosc/params.hpp"

using namespace snosc;

namespace {

PhysicalParams table1() {
    PhysicalParams p;
    p.M = 1e-5;
    p.omega = 10.0 * M_PI;
    p.gamma_m = 0.1;
    p.T_bath = 10.0;
    p.m_atom = 9.3e-26;
    p.delta_x_zp = 3.5e-12;
    p.omega_sn = 0.12;
    p.validate();
    return p;
}

}  // namespace

TEST_CASE("compute_omega_sn matches the tabulated value for the magnetic setup") {
    const double w = compute_omega_sn(6.674e-11, 9.3e-26, 3.5e-12);
    CHECK(w == doctest::Approx(0.11667274493602706).epsilon(1e-12));
    CHECK(std::abs(w - 0.12) < 0.005);  // rounds to 1.2e-1
}

TEST_CASE("compute_omega_sn scales as sqrt(m)") {
    const double w1 = compute_omega_sn(6.674e-11, 9.3e-26, 3.5e-12);
    const double w4 = compute_omega_sn(6.674e-11, 4.0 * 9.3e-26, 3.5e-12);
    CHECK(w4 == doctest::Approx(2.0 * w1).epsilon(1e-13));
}

TEST_CASE("compute_omega_sn frozen fixture at delta_x_zp = 7 pm") {
    // high-precision evaluation of the closed form, frozen
    CHECK(compute_omega_sn(6.674e-11, 9.3e-26, 7.0e-12) ==
          doctest::Approx(0.04125004456195658).epsilon(1e-12));
}

TEST_CASE("compute_omega_sn invariant under m -> s m, dx -> s^{1/3} dx") {
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> scale(0.1, 50.0);
    for (int i = 0; i < 50; ++i) {
        const double s = scale(rng);
        const double base = compute_omega_sn(6.674e-11, 9.3e-26, 3.5e-12);
        const double scaled =
            compute_omega_sn(6.674e-11, s * 9.3e-26, std::cbrt(s) * 3.5e-12);
        CHECK(scaled == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("compute_omega_sn rejects non-positive inputs") {
    CHECK_THROWS_AS(compute_omega_sn(6.674e-11, 0.0, 3.5e-12), std::domain_error);
    CHECK_THROWS_AS(compute_omega_sn(6.674e-11, 9.3e-26, -1.0), std::domain_error);
}

TEST_CASE("schedule_times closed forms at gamma = 0") {
    const ModulationSchedule s = schedule_times(M_PI / 2, 2.0, 1.0, 0.0);
    CHECK(s.t1 == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(s.t2 == doctest::Approx(M_PI / 4).epsilon(1e-15));
    CHECK(s.tau == doctest::Approx(3 * M_PI / 4).epsilon(1e-15));

    const ModulationSchedule u = schedule_times(1.0, 1.0, 7.3, 0.0);
    CHECK(u.t1 == doctest::Approx(1.0 / 7.3).epsilon(1e-15));
    CHECK(u.t2 == doctest::Approx(1.0 / 7.3).epsilon(1e-15));
}

TEST_CASE("schedule_times frozen fixture with damping") {
    const ModulationSchedule s = schedule_times(1.911, 2.0, 10.0 * M_PI, 0.1);
    CHECK(s.t1 == doctest::Approx(0.060829096290721635).epsilon(1e-14));
    CHECK(s.t2 == doctest::Approx(0.030414519254972382).epsilon(1e-14));
}

TEST_CASE("schedule_times monotone in alpha, t2 decreasing in beta") {
    double prev_t1 = 0.0, prev_tau = 0.0;
    for (double a = 0.2; a < 3.0; a += 0.2) {
        const ModulationSchedule s = schedule_times(a, 1.7, 5.0, 0.3);
        CHECK(s.t1 > prev_t1);
        CHECK(s.tau > prev_tau);
        prev_t1 = s.t1;
        prev_tau = s.tau;
    }
    double prev_t2 = 1e9;
    for (double b = 0.5; b < 4.0; b += 0.25) {
        const ModulationSchedule s = schedule_times(1.3, b, 5.0, 0.3);
        CHECK(s.t2 < prev_t2);
        prev_t2 = s.t2;
    }
}

TEST_CASE("schedule_times names the overdamped segment") {
    CHECK_THROWS_WITH_AS(schedule_times(1.0, 0.4, 1.0, 1.0),
                         "schedule: segment 2 overdamped (beta^2 omega^2 <= gamma_m^2/4)",
                         std::domain_error);
    CHECK_THROWS_WITH_AS(schedule_times(1.0, 2.0, 0.4, 1.0),
                         "schedule: segment 1 overdamped (omega^2 <= gamma_m^2/4)",
                         std::domain_error);
}

TEST_CASE("params validation") {
    PhysicalParams p = table1();
    CHECK_NOTHROW(p.validate());

    PhysicalParams bad = p;
    bad.M = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::domain_error);

    bad = p;
    bad.gamma_m = 100.0;  // overdamped
    CHECK_THROWS_AS(bad.validate(), std::domain_error);

    PhysicalParams d;
    d.unit_mode = UnitMode::dimensionless;
    d.M = 1.0;
    d.omega = 1.0;
    d.hbar = 1.0;
    d.k_B = 1.0;
    d.G_newton = 1.0;
    d.omega_sn = 0.3;
    CHECK_NOTHROW(d.validate());
    d.omega = 2.0;
    CHECK_THROWS_AS(d.validate(), std::domain_error);
}

TEST_CASE("ground state covariance and initial-condition validation") {
    const PhysicalParams p = table1();
    const CovarianceState g = ground_state_covariance(p);
    CHECK(g.v_xx == doctest::Approx(1.6785e-31).epsilon(1e-3));
    CHECK(g.v_pp == doctest::Approx(p.hbar * p.M * p.omega / 2).epsilon(1e-15));

    InitialConditions ic;
    ic.cov0 = g;
    CHECK_NOTHROW(ic.validate(p));

    ic.cov0.v_pp *= 0.5;  // below the Heisenberg bound
    CHECK_THROWS_AS(ic.validate(p), std::domain_error);

    ic = {};
    ic.cov0 = g;
    ic.trap_halfwidth = 0.0;
    CHECK_THROWS_AS(ic.validate(p), std::domain_error);
}
