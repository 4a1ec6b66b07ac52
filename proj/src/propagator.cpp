#include "snosc/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include "snosc/expm.hpp"

namespace snosc {

Eigen::Matrix3d build_p(double mass, double omega_eff, double gamma_m) {
    if (!(mass > 0.0)) throw std::domain_error("build_p: mass must be > 0");
    if (!(omega_eff >= 0.0)) throw std::domain_error("build_p: omega_eff must be >= 0");
    const double mw2 = mass * omega_eff * omega_eff;
    Eigen::Matrix3d p;
    p << 0.0, 2.0 / mass, 0.0,
        -mw2, -gamma_m, 1.0 / mass,
        0.0, -2.0 * mw2, -2.0 * gamma_m;
    return p;
}

SegmentPropagator segment_propagator_at(const PhysicalParams& p, double omega_eff,
                                        bool thermal_drive, double duration) {
    const Eigen::Matrix3d gen = build_p(p.M, omega_eff, p.gamma_m);
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    if (thermal_drive) c[2] = p.thermal_drive();
    const AffineMap3 map = expm_affine(gen, c, duration);
    return {map.m, map.d, duration, omega_eff};
}

namespace {

double segment_frequency(const PhysicalParams& p, const ModulationSchedule& s,
                         int segment_index, Block block, bool include_sn) {
    const double omega_t = segment_index == 1 ? p.omega : s.beta * p.omega;
    if (block == Block::classical || !include_sn) return omega_t;
    return p.omega_q(omega_t);
}

}  // namespace

SegmentPropagator segment_propagator(const PhysicalParams& p, const ModulationSchedule& s,
                                     int segment_index, Block block, bool include_sn) {
    if (segment_index != 1 && segment_index != 2)
        throw std::domain_error("segment_propagator: segment_index must be 1 or 2");
    const double omega_eff = segment_frequency(p, s, segment_index, block, include_sn);
    const double duration = segment_index == 1 ? s.t1 : s.t2;
    return segment_propagator_at(p, omega_eff, block == Block::classical, duration);
}

SegmentPropagator compose(const SegmentPropagator& second, const SegmentPropagator& first) {
    SegmentPropagator out;
    out.matrix_m = second.matrix_m * first.matrix_m;
    out.drive_d = second.matrix_m * first.drive_d + second.drive_d;
    out.duration = first.duration + second.duration;
    out.frequency_used = first.frequency_used;
    return out;
}

SegmentPropagator cycle_map(const PhysicalParams& p, const ModulationSchedule& s,
                            Block block, bool include_sn) {
    return compose(segment_propagator(p, s, 2, block, include_sn),
                   segment_propagator(p, s, 1, block, include_sn));
}

namespace {

struct BlockMaps {
    SegmentPropagator seg[2];      // whole-segment maps
    SegmentPropagator sub[2];      // substep maps
};

BlockMaps make_maps(const PhysicalParams& p, const ModulationSchedule& s, Block block,
                    bool include_sn, int substeps) {
    BlockMaps maps;
    for (int seg = 1; seg <= 2; ++seg) {
        const double omega_eff = segment_frequency(p, s, seg, block, include_sn);
        const double duration = seg == 1 ? s.t1 : s.t2;
        const bool drive = block == Block::classical;
        maps.seg[seg - 1] = segment_propagator_at(p, omega_eff, drive, duration);
        maps.sub[seg - 1] = segment_propagator_at(p, omega_eff, drive, duration / substeps);
    }
    return maps;
}

inline Eigen::Vector3d apply(const SegmentPropagator& m, const Eigen::Vector3d& x) {
    return m.matrix_m * x + m.drive_d;
}

}  // namespace

PropagationResult propagate_second_moments(const SecondMomentSystem& system0,
                                           const PhysicalParams& p,
                                           const ModulationSchedule& s,
                                           bool include_sn, int n_cycles,
                                           int substeps_per_segment) {
    if (n_cycles < 0) throw std::domain_error("propagate: n_cycles must be >= 0");
    if (substeps_per_segment < 1)
        throw std::domain_error("propagate: substeps_per_segment must be >= 1");

    const BlockMaps qmaps = make_maps(p, s, Block::quantum, include_sn, substeps_per_segment);
    const BlockMaps cmaps = make_maps(p, s, Block::classical, include_sn, substeps_per_segment);

    PropagationResult res;
    res.rows.reserve(static_cast<std::size_t>(n_cycles) * 2 * substeps_per_segment + 1);

    Eigen::Vector3d q = system0.quantum.vec();
    Eigen::Vector3d w = system0.classical.vec();

    auto emit = [&](double t, int cycle) {
        MomentSeriesRow row;
        row.t = t;
        row.quantum = CovarianceState::from_vec(q);
        row.classical = CovarianceState::from_vec(w);
        row.v_xx_total = q[0] + w[0];
        row.cycle_index = cycle;
        res.rows.push_back(row);
    };
    auto finite = [&]() { return q.allFinite() && w.allFinite(); };

    emit(0.0, 0);
    for (int n = 0; n < n_cycles; ++n) {
        const double t_cycle = n * s.tau;
        for (int seg = 0; seg < 2; ++seg) {
            const double t_seg0 = seg == 0 ? t_cycle : t_cycle + s.t1;
            const double t_len = seg == 0 ? s.t1 : s.t2;
            const Eigen::Vector3d q0 = q, w0 = w;
            for (int k = 1; k <= substeps_per_segment; ++k) {
                if (k < substeps_per_segment) {
                    q = apply(qmaps.sub[seg], q);
                    w = apply(cmaps.sub[seg], w);
                } else {
                    // segment boundary is advanced with the whole-segment map,
                    // so cycle-boundary states do not depend on the substep count
                    q = apply(qmaps.seg[seg], q0);
                    w = apply(cmaps.seg[seg], w0);
                }
                if (!finite()) {
                    res.status = PropagationStatus::diverged;
                    res.final_state = {CovarianceState::from_vec(q0), CovarianceState::from_vec(w0)};
                    res.cycles_completed = n;
                    return res;
                }
                emit(t_seg0 + k * (t_len / substeps_per_segment), n);
            }
        }
        res.cycles_completed = n + 1;
    }
    res.final_state = {CovarianceState::from_vec(q), CovarianceState::from_vec(w)};
    return res;
}

}  // namespace snosc
