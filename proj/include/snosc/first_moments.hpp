#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "snosc/params.hpp"

namespace snosc {

/// Generator of the mean dynamics d/dt (x, p) = A (x, p):
///   A = [[0, 1/M], [-M w^2, -gamma]].
/// The self-gravity term exerts no force on the mean, so omega_eff is always
/// the bare trap frequency of the segment.
Eigen::Matrix2d build_a(double mass, double omega_eff, double gamma_m);

/// Per-cycle linear map A = e^{A2 t2} e^{A1 t1} on MeanState. Independent of
/// omega_sn by construction; det = e^{-gamma tau}.
Eigen::Matrix2d first_moment_cycle(const PhysicalParams& p, const ModulationSchedule& s);

/// Closed-form Floquet multipliers of the undamped first-moment cycle map
/// (M = omega = 1 scaling drops out). Complex for stable (alpha, beta).
std::pair<std::complex<double>, std::complex<double>>
analytic_eigenvalues_gamma0(double alpha, double beta);

struct MeanSeriesRow {
    double t = 0.0;
    MeanState mean;
    bool at_local_max = false;  // local maximum of |x_mean|
};

std::vector<MeanSeriesRow> propagate_first_moments(const MeanState& mean0,
                                                   const PhysicalParams& p,
                                                   const ModulationSchedule& s,
                                                   int n_cycles, int substeps_per_segment = 64);

/// Earliest substep time with |x_mean| > trap_halfwidth, or nullopt
/// ("confined") if none occurs before t_max.
std::optional<double> trap_exit_time(const PhysicalParams& p, const ModulationSchedule& s,
                                     const MeanState& mean0, double trap_halfwidth,
                                     double t_max, int substeps_per_segment = 64);

}  // namespace snosc
