#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "snosc/floquet.hpp"
#include "snosc/propagator.hpp"

namespace snosc {

/// Piecewise-linear interpolation of the local maxima of an oscillating
/// series. Before the first maximum the envelope equals the first maximum;
/// after the last it stays at the last.
struct EnvelopeSeries {
    std::vector<double> times;
    std::vector<double> values;
    bool fallback_series = false;  // no interior maxima: series is its own envelope

    double value_at(double t) const;
};

/// Local maxima by three-point comparison (plateaus take the leftmost
/// sample). Throws std::runtime_error("series too short or monotone") when no
/// interior maximum exists and the series is not constant; a constant series
/// yields its t=0 sample as a single plateau maximum.
EnvelopeSeries extract_envelope(std::span<const double> times, std::span<const double> values);

/// extract_envelope, but a series without interior maxima (weakly damped
/// monotone decay at beta = 1, say) falls back to the sampled series itself.
EnvelopeSeries envelope_or_series(std::span<const double> times, std::span<const double> values);

/// Both variants run on the identical substep grid; envelopes of the
/// quantum-block V_xx (the wave-function spread, which is the SN-sensitive
/// observable; the thermal W block is common to both variants and cancels in
/// the difference).
struct DeltaEnvelopeResult {
    std::vector<double> t;
    std::vector<double> v_xx_no_sn, v_xx_sn;  // quantum-block series
    std::vector<double> delta_raw;            // v_xx_no_sn - v_xx_sn
    std::vector<double> env_no_sn, env_sn;    // envelopes on the common grid
    std::vector<double> delta_env;            // env_no_sn - env_sn
    PropagationResult run_no_sn, run_sn;
};

DeltaEnvelopeResult delta_envelope(const PhysicalParams& p, const ModulationSchedule& s,
                                   const CovarianceState& cov0, int n_cycles,
                                   int substeps_per_segment = 64);

struct AsymptoticUnstableError : std::runtime_error {
    AsymptoticUnstableError(const std::string& what, StabilityReport no_sn, StabilityReport sn)
        : std::runtime_error(what), report_no_sn(std::move(no_sn)), report_sn(std::move(sn)) {}
    StabilityReport report_no_sn, report_sn;
};

struct AsymptoticDeltaResult {
    double delta_inf = 0.0;       // env_max_no_sn - env_max_sn
    double env_max_no_sn = 0.0;   // V_xx maximum over the periodic orbit
    double env_max_sn = 0.0;
    StabilityReport report_no_sn, report_sn;
};

/// Asymptotic envelope difference from the fixed points of the per-cycle
/// affine maps with the thermal drive applied at each variant's effective
/// frequency (omega_q with SN, omega without). Requires both variants to be
/// strictly stable; throws AsymptoticUnstableError otherwise.
AsymptoticDeltaResult asymptotic_delta(const PhysicalParams& p, const ModulationSchedule& s,
                                       int substeps_per_segment = 64);

enum class CellClass { stable, marginal, unstable, error_cell };

const char* to_string(CellClass c);

/// Classification of the homogeneous (F-terms-neglected) monodromy on an
/// (alpha, beta) grid, for omega_sn = 0 and omega_sn = params.omega_sn.
/// Cells whose schedule is overdamped are recorded as error cells.
struct StabilityMap {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<CellClass> class_no_sn;  // row-major [i_alpha * n_beta + i_beta]
    std::vector<CellClass> class_sn;
    double gamma_m = 0.0;
    bool f_terms_neglected = true;

    CellClass no_sn(int ia, int ib) const { return class_no_sn[ia * betas.size() + ib]; }
    CellClass sn(int ia, int ib) const { return class_sn[ia * betas.size() + ib]; }
};

StabilityMap stability_map(const PhysicalParams& p, double alpha_min, double alpha_max,
                           double beta_min, double beta_max, int n_alpha, int n_beta,
                           int n_threads = 0);

/// Earliest sample time with sqrt(v_xx) >= delta_x_zp, or nullopt ("valid").
/// The comparison is length against length, using the wave-function spread.
std::optional<double> check_validity(std::span<const double> times,
                                     std::span<const double> v_xx, double delta_x_zp);

}  // namespace snosc
