#include <cmath>

#include "doctest.h"

#include "snosc/monte_carlo.hpp"
#include "snosc/propagator.hpp"

using namespace snosc;

namespace {

PhysicalParams table1() {
    PhysicalParams p;
    p.M = 1e-5;
    p.omega = 10.0 * M_PI;
    p.gamma_m = 0.1;
    p.T_bath = 10.0;
    p.omega_sn = 0.12;
    return p;
}

PhysicalParams unit_params(double gamma, double t_bath) {
    PhysicalParams p;
    p.M = 1.0;
    p.omega = 1.0;
    p.hbar = 1.0;
    p.k_B = 1.0;
    p.G_newton = 1.0;
    p.gamma_m = gamma;
    p.T_bath = t_bath;
    p.omega_sn = 0.0;
    p.unit_mode = UnitMode::dimensionless;
    return p;
}

EnsembleSpec base_spec(const PhysicalParams& p, double alpha, double beta) {
    EnsembleSpec spec;
    spec.params = p;
    spec.schedule = make_schedule(p, alpha, beta);
    spec.n_trajectories = 400;
    spec.dt = std::min(spec.schedule.t1, spec.schedule.t2) / 400.0;
    spec.seed = 1234;
    spec.n_cycles = 5;
    return spec;
}

InitialConditions ground_ic(const PhysicalParams& p) {
    InitialConditions ic;
    ic.cov0 = ground_state_covariance(p);
    return ic;
}

}  // namespace

TEST_CASE("ensemble spec validation") {
    const PhysicalParams p = unit_params(0.1, 1.0);
    EnsembleSpec spec = base_spec(p, 1.0, 2.0);
    CHECK_NOTHROW(spec.validate());

    spec.n_trajectories = 50;
    CHECK_THROWS_AS(spec.validate(), std::domain_error);

    spec = base_spec(p, 1.0, 2.0);
    spec.dt = spec.schedule.t2 / 10.0;  // above the cap
    CHECK_THROWS_AS(spec.validate(), std::domain_error);
}

TEST_CASE("zero damping gives a noiseless ensemble equal to the quantum block") {
    const PhysicalParams p = unit_params(0.0, 0.0);
    EnsembleSpec spec = base_spec(p, 1.2, 2.0);
    spec.n_trajectories = 150;
    InitialConditions ic = ground_ic(p);
    ic.mean0 = {0.3, -0.1};
    const EnsembleResult res = run_ensemble(spec, ic);

    SecondMomentSystem sys{ic.cov0, {}};
    const PropagationResult det = propagate_second_moments(sys, p, spec.schedule, false,
                                                           spec.n_cycles, 1);
    for (std::size_t k = 0; k < res.rows.size(); ++k) {
        const auto& drow = det.rows[2 * k];
        CHECK(res.rows[k].v_xx_hat == doctest::Approx(drow.quantum.v_xx).epsilon(1e-12));
        // identical trajectories: the estimate carries only summation dust
        CHECK(res.rows[k].v_xx_stderr <= 1e-12 * std::abs(res.rows[k].v_xx_hat));
    }
}

TEST_CASE("seed determinism and thread independence") {
    const PhysicalParams p = table1();
    EnsembleSpec spec = base_spec(p, 1.911, 2.0);
    const InitialConditions ic = ground_ic(p);

    const EnsembleResult a = run_ensemble(spec, ic, 1);
    const EnsembleResult b = run_ensemble(spec, ic, 3);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k].v_xx_hat == b.rows[k].v_xx_hat);  // bitwise
        CHECK(a.rows[k].v_xx_stderr == b.rows[k].v_xx_stderr);
        CHECK(a.rows[k].v_pp_hat == b.rows[k].v_pp_hat);
    }

    EnsembleSpec other = spec;
    other.seed = spec.seed + 1;
    const EnsembleResult c = run_ensemble(other, ic, 1);
    CHECK(c.rows.back().v_xx_hat != a.rows.back().v_xx_hat);
}

TEST_CASE("Euler drift is weak order one on the noiseless component") {
    // T = 0 keeps gamma in the drift but turns the noise off; the mean then
    // carries the pure integrator error against the exact flow
    const PhysicalParams p = unit_params(0.4, 0.0);
    InitialConditions ic = ground_ic(p);
    ic.mean0 = {1.0, 0.0};

    auto mean_error = [&](double divisor) {
        EnsembleSpec spec = base_spec(p, 1.3, 2.0);
        spec.n_trajectories = 100;
        spec.dt = std::min(spec.schedule.t1, spec.schedule.t2) / divisor;
        spec.n_cycles = 4;
        const EnsembleResult res = run_ensemble(spec, ic);
        const SegmentPropagator s1 = segment_propagator_at(p, p.omega, false, spec.schedule.t1);
        const SegmentPropagator s2 =
            segment_propagator_at(p, 2.0 * p.omega, false, spec.schedule.t2);
        // exact mean via the 2x2 restriction: evolve (x, p) with the same
        // segment structure using closed-form rotations
        Eigen::Vector2d y(ic.mean0.x_mean, ic.mean0.p_mean);
        (void)s1;
        (void)s2;
        auto rot = [&](double w, double t, const Eigen::Vector2d& v) {
            const double g = p.gamma_m;
            const double wb = std::sqrt(w * w - g * g / 4.0);
            const double decay = std::exp(-g * t / 2.0);
            const double c = std::cos(wb * t), s = std::sin(wb * t);
            Eigen::Matrix2d m;
            m << c + g / (2.0 * wb) * s, s / (p.M * wb),
                -p.M * w * w / wb * s, c - g / (2.0 * wb) * s;
            return Eigen::Vector2d(decay * (m * v));
        };
        for (int n = 0; n < spec.n_cycles; ++n) {
            y = rot(p.omega, spec.schedule.t1, y);
            y = rot(2.0 * p.omega, spec.schedule.t2, y);
        }
        return std::abs(res.rows.back().x_mean_hat - y[0]) +
               std::abs(res.rows.back().p_mean_hat - y[1]);
    };

    const double coarse = mean_error(300.0);
    const double fine = mean_error(600.0);
    CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("standard errors shrink like one over root n") {
    const PhysicalParams p = unit_params(0.2, 1.0);
    InitialConditions ic = ground_ic(p);

    EnsembleSpec spec = base_spec(p, 1.0, 2.0);
    spec.n_trajectories = 2000;
    const EnsembleResult small = run_ensemble(spec, ic);
    spec.n_trajectories = 4000;
    const EnsembleResult big = run_ensemble(spec, ic);

    const double ratio =
        big.rows.back().v_xx_stderr / small.rows.back().v_xx_stderr;
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.15));
}

TEST_CASE("ensemble covariance agrees statistically with the deterministic moments") {
    const PhysicalParams p = table1();
    EnsembleSpec spec = base_spec(p, 1.911, 1.0);
    spec.n_trajectories = 1000;
    spec.n_cycles = 5;
    spec.dt = std::min(spec.schedule.t1, spec.schedule.t2) / 2000.0;
    spec.include_sn = true;
    const InitialConditions ic = ground_ic(p);
    const EnsembleResult mc = run_ensemble(spec, ic);

    SecondMomentSystem sys{ic.cov0, {}};
    const PropagationResult det =
        propagate_second_moments(sys, p, spec.schedule, true, spec.n_cycles, 1);
    for (std::size_t k = 1; k < mc.rows.size(); ++k) {
        const auto& drow = det.rows[2 * k];
        const CovarianceState tot = drow.quantum + drow.classical;
        const double z =
            std::abs(tot.v_xx - mc.rows[k].v_xx_hat) / mc.rows[k].v_xx_stderr;
        CHECK(z < 5.0);  // loose rail; the acceptance suite runs the 4-sigma version
    }
}
