#include <cmath>
#include <random>

#include "doctest.h"

#include <Eigen/Dense>

#include "snosc/floquet.hpp"

using namespace snosc;

namespace {

PhysicalParams dimensionless(double gamma, double omega_sn) {
    PhysicalParams p;
    p.M = 1.0;
    p.omega = 1.0;
    p.hbar = 1.0;
    p.k_B = 1.0;
    p.G_newton = 1.0;
    p.gamma_m = gamma;
    p.T_bath = gamma > 0.0 ? 1.0 : 0.0;
    p.omega_sn = omega_sn;
    p.unit_mode = UnitMode::dimensionless;
    return p;
}

Eigen::Matrix3d random_matrix(std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = u(rng);
    return m;
}

}  // namespace

TEST_CASE("eigenvalues of simple matrices") {
    const auto id = eigenvalues(Eigen::MatrixXd(Eigen::Matrix3d::Identity()));
    for (const auto& v : id) CHECK(std::abs(v - 1.0) < 1e-14);

    Eigen::Matrix3d d = Eigen::Vector3d(2.0, 0.5, 1.0).asDiagonal();
    const auto dv = eigenvalues(Eigen::MatrixXd(d));
    CHECK(std::abs(dv[0] - 2.0) < 1e-12);
    CHECK(std::abs(dv[1] - 1.0) < 1e-12);
    CHECK(std::abs(dv[2] - 0.5) < 1e-12);
}

TEST_CASE("eigenvalue product equals the determinant; residuals small") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Matrix3d a = random_matrix(rng, 2.0);
        const auto evs = eigenvalues(Eigen::MatrixXd(a));
        std::complex<double> prod = 1.0;
        for (const auto& v : evs) prod *= v;
        CHECK(std::abs(prod - a.determinant()) <
              1e-9 * std::max(1.0, std::abs(a.determinant())));

        const double norm = a.norm();
        for (const auto& v : evs) {
            Eigen::Matrix3cd shifted = a.cast<std::complex<double>>();
            shifted.diagonal().array() -= v;
            CHECK(std::abs(shifted.determinant()) < 1e-8 * norm * norm * norm);
        }
        // conjugate pairing
        for (const auto& v : evs) {
            if (std::abs(v.imag()) < 1e-14) continue;
            bool paired = false;
            for (const auto& w : evs)
                if (std::abs(w - std::conj(v)) < 1e-10) paired = true;
            CHECK(paired);
        }
    }
}

TEST_CASE("undamped constant-frequency monodromy is marginal and semisimple") {
    const PhysicalParams p = dimensionless(0.0, 0.0);
    const ModulationSchedule s = make_schedule(p, M_PI / 4, 1.0);
    const SegmentPropagator cyc = cycle_map(p, s, Block::quantum, false);
    const StabilityReport rep = classify_stability(cyc.matrix_m);
    CHECK(rep.classification == Classification::marginal);
    CHECK(rep.semisimple_boundary);
    for (const double m : rep.moduli) CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("damping makes the constant-frequency monodromy stable") {
    PhysicalParams p = dimensionless(0.0, 0.0);
    p.gamma_m = 0.15;
    p.T_bath = 1.0;
    for (const double alpha : {0.4, 1.1, 2.7}) {
        const ModulationSchedule s = make_schedule(p, alpha, 1.0);
        const SegmentPropagator cyc = cycle_map(p, s, Block::quantum, false);
        const StabilityReport rep = classify_stability(cyc.matrix_m);
        CHECK(rep.classification == Classification::stable);
        CHECK(rep.spectral_radius == doctest::Approx(std::exp(-p.gamma_m * s.tau)).epsilon(1e-9));
    }
}

TEST_CASE("self-gravity flips the classification at the modulated point") {
    // (alpha, beta) = (3/2, 2): unstable without the SN term; some
    // omega_sn in (0, 1) must flip it (located by scan, the paper leaves the
    // panel value unstated)
    const PhysicalParams p0 = dimensionless(0.0, 0.0);
    const ModulationSchedule s = make_schedule(p0, 1.5, 2.0);
    const Classification base =
        classify_stability(cycle_map(p0, s, Block::quantum, false).matrix_m).classification;
    CHECK(base == Classification::unstable);

    bool flipped = false;
    for (int k = 1; k <= 200 && !flipped; ++k) {
        const PhysicalParams p = dimensionless(0.0, k * (1.0 / 200.0));
        const Classification c =
            classify_stability(cycle_map(p, s, Block::quantum, true).matrix_m).classification;
        if (c != Classification::unstable) flipped = true;
    }
    CHECK(flipped);
}

TEST_CASE("unit-modulus moduli multiply to one for undamped cycles") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ua(0.1, 3.0), ub(0.3, 4.0), uw(0.0, 0.8);
    for (int trial = 0; trial < 25; ++trial) {
        const PhysicalParams p = dimensionless(0.0, uw(rng));
        const ModulationSchedule s = make_schedule(p, ua(rng), ub(rng));
        const StabilityReport rep =
            classify_stability(cycle_map(p, s, Block::quantum, true).matrix_m);
        double prod = 1.0;
        for (const double m : rep.moduli) prod *= m;
        CHECK(prod == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("classification is invariant under well-conditioned similarity") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const PhysicalParams p = dimensionless(trial % 2 == 0 ? 0.0 : 0.1, 0.3);
        if (p.gamma_m > 0.0) {
            // keep the draw overdamping-safe at small beta
        }
        std::uniform_real_distribution<double> ua(0.2, 3.0), ub(0.6, 3.5);
        const ModulationSchedule s = make_schedule(p, ua(rng), ub(rng));
        const Eigen::Matrix3d mono = cycle_map(p, s, Block::quantum, true).matrix_m;

        Eigen::Matrix3d t;
        double cond = 1e9;
        do {
            t = random_matrix(rng, 1.0) + 2.0 * Eigen::Matrix3d::Identity();
            Eigen::JacobiSVD<Eigen::Matrix3d> svd(t);
            cond = svd.singularValues()[0] / svd.singularValues()[2];
        } while (cond > 1e3);

        const Eigen::Matrix3d similar = t * mono * t.inverse();
        const StabilityReport a = classify_stability(mono);
        const StabilityReport b = classify_stability(similar);
        CHECK(a.classification == b.classification);
        for (int i = 0; i < 3; ++i)
            CHECK(a.moduli[i] == doctest::Approx(b.moduli[i]).epsilon(1e-8));
    }
}

TEST_CASE("thermal fixed point of the unmodulated classical block") {
    PhysicalParams p = dimensionless(0.0, 0.0);
    p.gamma_m = 0.2;
    p.T_bath = 2.5;
    const ModulationSchedule s = make_schedule(p, 1.0, 1.0);
    const SegmentPropagator cyc = cycle_map(p, s, Block::classical, false);
    const CovarianceState fp = fixed_point_covariance(cyc);
    CHECK(fp.v_xx == doctest::Approx(p.k_B * p.T_bath / (p.M * p.omega * p.omega)).epsilon(1e-10));
    CHECK(std::abs(fp.v_xp) < 1e-10 * fp.v_xx);
    CHECK(fp.v_pp == doctest::Approx(p.M * p.k_B * p.T_bath).epsilon(1e-10));
}

TEST_CASE("zero drive gives the zero fixed point") {
    PhysicalParams p = dimensionless(0.0, 0.0);
    p.gamma_m = 0.3;
    p.T_bath = 0.0;
    const ModulationSchedule s = make_schedule(p, 1.0, 2.0);
    const CovarianceState fp = fixed_point_covariance(cycle_map(p, s, Block::classical, false));
    CHECK(fp.v_xx == 0.0);
    CHECK(fp.v_xp == 0.0);
    CHECK(fp.v_pp == 0.0);
}

TEST_CASE("fixed point agrees with iterating the affine map") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ua(0.3, 2.5), ub(0.7, 3.0), ug(0.05, 0.25);
    int tested = 0;
    while (tested < 10) {
        PhysicalParams p = dimensionless(0.0, 0.0);
        p.gamma_m = ug(rng);
        p.T_bath = 1.0;
        const ModulationSchedule s = make_schedule(p, ua(rng), ub(rng));
        const SegmentPropagator cyc = cycle_map(p, s, Block::classical, false);
        if (classify_stability(cyc.matrix_m).classification != Classification::stable) continue;
        const CovarianceState fp = fixed_point_covariance(cyc);

        Eigen::Vector3d x(0.7, -0.1, 0.4);  // arbitrary start
        for (int k = 0; k < 10000; ++k) x = cyc.matrix_m * x + cyc.drive_d;
        CHECK((x - fp.vec()).norm() < 1e-8 * std::max(1.0, fp.vec().norm()));
        // fixed-point residual
        CHECK((cyc.matrix_m * fp.vec() + cyc.drive_d - fp.vec()).norm() <=
              1e-10 * std::max(1.0, fp.vec().norm()));
        ++tested;
    }
}

TEST_CASE("fixed point refuses non-contracting cycles") {
    const PhysicalParams p = dimensionless(0.0, 0.0);
    const ModulationSchedule s = make_schedule(p, 1.0, 1.0);
    const SegmentPropagator cyc = cycle_map(p, s, Block::classical, false);  // marginal
    CHECK_THROWS_AS(fixed_point_covariance(cyc), NoFixedPointError);
    try {
        fixed_point_covariance(cyc);
    } catch (const NoFixedPointError& e) {
        CHECK(e.report.classification == Classification::marginal);
    }
}

TEST_CASE("neumann partial sums") {
    const Eigen::Matrix3d half = 0.5 * Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d s = neumann_partial_sum(half, 60);
    CHECK((s - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    Eigen::Matrix3d x;
    for (int i = 0; i < 9; ++i) x(i / 3, i % 3) = u(rng) / 2.0;
    const Eigen::Matrix3d s200 = neumann_partial_sum(x, 200);
    const Eigen::Matrix3d closed =
        (Eigen::Matrix3d::Identity() - x).inverse() * x;
    CHECK((s200 - closed).cwiseAbs().maxCoeff() < 1e-10);

    // growth beyond the unit circle
    const Eigen::Matrix3d grow = 1.2 * Eigen::Matrix3d::Identity();
    double prev = 0.0;
    for (int n = 5; n <= 40; n += 5) {
        const double norm = neumann_partial_sum(grow, n).norm();
        CHECK(norm > prev);
        prev = norm;
    }
}

TEST_CASE("classify_stability handles 2x2 monodromies") {
    Eigen::MatrixXd rot(2, 2);
    rot << std::cos(1.0), std::sin(1.0), -std::sin(1.0), std::cos(1.0);
    const StabilityReport rep = classify_stability(rot);
    CHECK(rep.classification == Classification::marginal);
    CHECK(rep.eigenvalues.size() == 2);
    CHECK(rep.semisimple_boundary);

    const StabilityReport shrunk = classify_stability(0.9 * rot);
    CHECK(shrunk.classification == Classification::stable);
    const StabilityReport grown = classify_stability(1.1 * rot);
    CHECK(grown.classification == Classification::unstable);
}

TEST_CASE("non-semisimple unit eigenvalue is flagged") {
    Eigen::MatrixXd jordan(2, 2);
    jordan << 1.0, 1.0, 0.0, 1.0;
    const StabilityReport rep = classify_stability(jordan);
    CHECK(rep.classification == Classification::marginal);
    CHECK_FALSE(rep.semisimple_boundary);
}
