#pragma once

#include <cstdint>
#include <vector>

#include "snosc/params.hpp"

namespace snosc {

/// Euler-Maruyama ensemble of the Langevin mean dynamics. Each trajectory
/// integrates (x, p) with drift at the bare trap frequency (the SN force
/// cancels on the mean) and Gaussian momentum increments of variance
/// 2 M gamma k_B T dt. Trajectory streams are split deterministically from
/// `seed`, so runs are reproducible and thread-count independent.
struct EnsembleSpec {
    int n_trajectories = 0;
    double dt = 0.0;  // requested step [s]; per segment the step is rounded
                      // down so an integer count lands on the boundary
    std::uint64_t seed = 0;
    PhysicalParams params;
    ModulationSchedule schedule;
    bool include_sn = false;
    int n_cycles = 0;

    /// Requires n_trajectories >= 100 and dt <= min(t1, t2)/200.
    void validate() const;
};

struct EnsembleRow {
    double t = 0.0;
    double v_xx_hat = 0.0, v_xx_stderr = 0.0;
    double v_xp_hat = 0.0, v_xp_stderr = 0.0;
    double v_pp_hat = 0.0, v_pp_stderr = 0.0;
    double x_mean_hat = 0.0, p_mean_hat = 0.0;  // ensemble means, diagnostics
};

struct EnsembleResult {
    std::vector<EnsembleRow> rows;  // cycle boundaries, t = 0 first
    int n_trajectories = 0;
    std::uint64_t seed = 0;
};

/// Estimate V_ab = quantum_ab + sample-cov(mean), with jackknife standard
/// errors, at every cycle boundary. The quantum block is advanced with the
/// exact segment propagators; only the stochastic means are Euler-Maruyama.
/// Throws std::runtime_error with the step index if a trajectory leaves the
/// finite range.
EnsembleResult run_ensemble(const EnsembleSpec& spec, const InitialConditions& initial,
                            int n_threads = 0);

}  // namespace snosc
