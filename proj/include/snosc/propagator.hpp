#pragma once

#include <vector>

#include <Eigen/Core>

#include "snosc/params.hpp"

namespace snosc {

/// Which block of the second-moment decomposition a propagator acts on.
/// The quantum block runs at omega_q (with SN) and has no drive; the
/// classical W block runs at the bare omega_t and carries the thermal drive
/// (0, 0, 2 M gamma_m k_B T).
enum class Block { quantum, classical };

/// Generator of the second-moment dynamics for one constant-frequency
/// segment, d/dt (V_xx, V_xp, V_pp) = P (V_xx, V_xp, V_pp) + c:
///   P = [[0, 2/M, 0], [-M w^2, -gamma, 1/M], [0, -2 M w^2, -2 gamma]].
/// trace(P) = -3 gamma, det(P) = -4 gamma w^2.
Eigen::Matrix3d build_p(double mass, double omega_eff, double gamma_m);

/// Affine map x(t0 + duration) = matrix_m * x(t0) + drive_d for one segment.
struct SegmentPropagator {
    Eigen::Matrix3d matrix_m;
    Eigen::Vector3d drive_d;
    double duration = 0.0;        // [s]
    double frequency_used = 0.0;  // effective frequency entering P [rad/s]
};

/// Propagator for a segment at an explicit effective frequency; used both for
/// the standard blocks and for the fixed-point analysis that applies the
/// thermal drive at the SN-shifted frequency.
SegmentPropagator segment_propagator_at(const PhysicalParams& p, double omega_eff,
                                        bool thermal_drive, double duration);

/// Segment propagator per block. segment_index is 1 or 2.
SegmentPropagator segment_propagator(const PhysicalParams& p, const ModulationSchedule& s,
                                     int segment_index, Block block, bool include_sn);

/// Composition second-after-first: M = m2 m1, d = m2 d1 + d2.
SegmentPropagator compose(const SegmentPropagator& second, const SegmentPropagator& first);

/// One full modulation period: segment 2 after segment 1.
SegmentPropagator cycle_map(const PhysicalParams& p, const ModulationSchedule& s,
                            Block block, bool include_sn);

enum class PropagationStatus { ok, diverged };

struct MomentSeriesRow {
    double t = 0.0;
    CovarianceState quantum;
    CovarianceState classical;
    double v_xx_total = 0.0;
    int cycle_index = 0;
};

struct PropagationResult {
    PropagationStatus status = PropagationStatus::ok;
    std::vector<MomentSeriesRow> rows;
    SecondMomentSystem final_state;  // last finite state
    int cycles_completed = 0;
};

/// Evolves both blocks over n_cycles periods, emitting substep-resolved
/// samples. Substeps only refine reporting: segment boundary states are
/// always advanced with the whole-segment propagator, so they do not depend
/// on substeps_per_segment. A non-finite component aborts with status
/// `diverged` and the last finite state retained.
PropagationResult propagate_second_moments(const SecondMomentSystem& system0,
                                           const PhysicalParams& p,
                                           const ModulationSchedule& s,
                                           bool include_sn, int n_cycles,
                                           int substeps_per_segment = 64);

}  // namespace snosc
