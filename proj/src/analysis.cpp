#include "snosc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace snosc {

double EnvelopeSeries::value_at(double t) const {
    if (times.empty()) return 0.0;
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

EnvelopeSeries extract_envelope(std::span<const double> times, std::span<const double> values) {
    if (times.size() != values.size()) throw std::invalid_argument("envelope: size mismatch");
    const std::size_t n = values.size();
    EnvelopeSeries env;
    if (n >= 1) {
        bool constant = true;
        for (std::size_t i = 1; i < n; ++i)
            if (values[i] != values[0]) { constant = false; break; }
        if (constant && n >= 3) {
            // single plateau maximum at the leftmost sample
            env.times = {times[0]};
            env.values = {values[0]};
            return env;
        }
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1]) {
            env.times.push_back(times[i]);
            env.values.push_back(values[i]);
        }
    }
    if (env.times.empty()) throw std::runtime_error("series too short or monotone");
    return env;
}

EnvelopeSeries envelope_or_series(std::span<const double> times, std::span<const double> values) {
    try {
        return extract_envelope(times, values);
    } catch (const std::runtime_error&) {
        EnvelopeSeries env;
        env.times.assign(times.begin(), times.end());
        env.values.assign(values.begin(), values.end());
        env.fallback_series = true;
        return env;
    }
}

DeltaEnvelopeResult delta_envelope(const PhysicalParams& p, const ModulationSchedule& s,
                                   const CovarianceState& cov0, int n_cycles,
                                   int substeps_per_segment) {
    SecondMomentSystem sys0;
    sys0.quantum = cov0;
    sys0.classical = {};

    DeltaEnvelopeResult out;
    out.run_no_sn = propagate_second_moments(sys0, p, s, false, n_cycles, substeps_per_segment);
    out.run_sn = propagate_second_moments(sys0, p, s, true, n_cycles, substeps_per_segment);

    const std::size_t n = std::min(out.run_no_sn.rows.size(), out.run_sn.rows.size());
    out.t.reserve(n);
    out.v_xx_no_sn.reserve(n);
    out.v_xx_sn.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.t.push_back(out.run_no_sn.rows[i].t);
        out.v_xx_no_sn.push_back(out.run_no_sn.rows[i].quantum.v_xx);
        out.v_xx_sn.push_back(out.run_sn.rows[i].quantum.v_xx);
    }
    const EnvelopeSeries env0 = envelope_or_series(out.t, out.v_xx_no_sn);
    const EnvelopeSeries envs = envelope_or_series(out.t, out.v_xx_sn);
    out.delta_raw.resize(n);
    out.env_no_sn.resize(n);
    out.env_sn.resize(n);
    out.delta_env.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.delta_raw[i] = out.v_xx_no_sn[i] - out.v_xx_sn[i];
        out.env_no_sn[i] = env0.value_at(out.t[i]);
        out.env_sn[i] = envs.value_at(out.t[i]);
        out.delta_env[i] = out.env_no_sn[i] - out.env_sn[i];
    }
    return out;
}

namespace {

/// Per-variant affine cycle machinery with the thermal drive applied at the
/// variant's effective frequencies.
struct VariantCycle {
    SegmentPropagator seg1, seg2, cycle;
};

VariantCycle variant_cycle(const PhysicalParams& p, const ModulationSchedule& s, bool include_sn) {
    const double w1 = include_sn ? p.omega_q(p.omega) : p.omega;
    const double w2 = include_sn ? p.omega_q(s.beta * p.omega) : s.beta * p.omega;
    VariantCycle v;
    v.seg1 = segment_propagator_at(p, w1, true, s.t1);
    v.seg2 = segment_propagator_at(p, w2, true, s.t2);
    v.cycle = compose(v.seg2, v.seg1);
    return v;
}

double orbit_vxx_max(const PhysicalParams& p, const ModulationSchedule& s,
                     const VariantCycle& v, const Eigen::Vector3d& start, int substeps) {
    const SegmentPropagator sub1 = segment_propagator_at(p, v.seg1.frequency_used, true,
                                                         s.t1 / substeps);
    const SegmentPropagator sub2 = segment_propagator_at(p, v.seg2.frequency_used, true,
                                                         s.t2 / substeps);
    Eigen::Vector3d y = start;
    double vmax = y[0];
    for (int k = 0; k < substeps; ++k) {
        y = sub1.matrix_m * y + sub1.drive_d;
        vmax = std::max(vmax, y[0]);
    }
    y = v.seg1.matrix_m * start + v.seg1.drive_d;  // snap to the exact boundary
    const Eigen::Vector3d mid = y;
    vmax = std::max(vmax, y[0]);
    for (int k = 0; k < substeps; ++k) {
        y = sub2.matrix_m * y + sub2.drive_d;
        vmax = std::max(vmax, y[0]);
    }
    y = v.seg2.matrix_m * mid + v.seg2.drive_d;
    vmax = std::max(vmax, y[0]);
    return vmax;
}

}  // namespace

AsymptoticDeltaResult asymptotic_delta(const PhysicalParams& p, const ModulationSchedule& s,
                                       int substeps_per_segment) {
    const VariantCycle v0 = variant_cycle(p, s, false);
    const VariantCycle vs = variant_cycle(p, s, true);
    AsymptoticDeltaResult out;
    out.report_no_sn = classify_stability(v0.cycle.matrix_m);
    out.report_sn = classify_stability(vs.cycle.matrix_m);
    if (out.report_no_sn.classification != Classification::stable ||
        out.report_sn.classification != Classification::stable) {
        throw AsymptoticUnstableError("asymptotic_delta: both variants must be strictly stable",
                                      out.report_no_sn, out.report_sn);
    }
    const Eigen::Vector3d x0 = fixed_point_covariance(v0.cycle).vec();
    const Eigen::Vector3d xs = fixed_point_covariance(vs.cycle).vec();
    out.env_max_no_sn = orbit_vxx_max(p, s, v0, x0, substeps_per_segment);
    out.env_max_sn = orbit_vxx_max(p, s, vs, xs, substeps_per_segment);
    out.delta_inf = out.env_max_no_sn - out.env_max_sn;
    return out;
}

const char* to_string(CellClass c) {
    switch (c) {
        case CellClass::stable: return "Stable";
        case CellClass::marginal: return "Marginal";
        case CellClass::unstable: return "Unstable";
        case CellClass::error_cell: return "Error";
    }
    return "?";
}

namespace {

CellClass to_cell(Classification c) {
    switch (c) {
        case Classification::stable: return CellClass::stable;
        case Classification::marginal: return CellClass::marginal;
        case Classification::unstable: return CellClass::unstable;
    }
    return CellClass::error_cell;
}

}  // namespace

StabilityMap stability_map(const PhysicalParams& p, double alpha_min, double alpha_max,
                           double beta_min, double beta_max, int n_alpha, int n_beta,
                           int n_threads) {
    if (n_alpha < 1 || n_beta < 1)
        throw std::domain_error("stability_map: resolution must be positive");
    StabilityMap map;
    map.gamma_m = p.gamma_m;
    map.f_terms_neglected = true;
    map.alphas.resize(n_alpha);
    map.betas.resize(n_beta);
    for (int i = 0; i < n_alpha; ++i)
        map.alphas[i] = n_alpha == 1 ? alpha_min
                                     : alpha_min + i * (alpha_max - alpha_min) / (n_alpha - 1);
    for (int j = 0; j < n_beta; ++j)
        map.betas[j] = n_beta == 1 ? beta_min
                                   : beta_min + j * (beta_max - beta_min) / (n_beta - 1);
    map.class_no_sn.assign(static_cast<std::size_t>(n_alpha) * n_beta, CellClass::error_cell);
    map.class_sn.assign(static_cast<std::size_t>(n_alpha) * n_beta, CellClass::error_cell);

    auto cell = [&](int ia, int jb) {
        const std::size_t idx = static_cast<std::size_t>(ia) * n_beta + jb;
        try {
            const ModulationSchedule s =
                schedule_times(map.alphas[ia], map.betas[jb], p.omega, p.gamma_m);
            const SegmentPropagator l0 = cycle_map(p, s, Block::quantum, false);
            map.class_no_sn[idx] = to_cell(classify_stability(l0.matrix_m).classification);
            const SegmentPropagator ls = cycle_map(p, s, Block::quantum, true);
            map.class_sn[idx] = to_cell(classify_stability(ls.matrix_m).classification);
        } catch (const std::domain_error&) {
            // overdamped segment: cell stays in the error state
        }
    };

    int hw = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    hw = std::min(hw, n_alpha);
    if (hw == 1) {
        for (int i = 0; i < n_alpha; ++i)
            for (int j = 0; j < n_beta; ++j) cell(i, j);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_alpha + hw - 1) / hw;
        for (int t = 0; t < hw; ++t) {
            const int b = t * chunk;
            const int e = std::min(n_alpha, b + chunk);
            if (b < e)
                pool.emplace_back([&, b, e]() {
                    for (int i = b; i < e; ++i)
                        for (int j = 0; j < n_beta; ++j) cell(i, j);
                });
        }
        for (auto& th : pool) th.join();
    }
    return map;
}

std::optional<double> check_validity(std::span<const double> times,
                                     std::span<const double> v_xx, double delta_x_zp) {
    if (times.empty() || times.size() != v_xx.size())
        throw std::invalid_argument("check_validity: empty or mismatched series");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::sqrt(std::max(0.0, v_xx[i])) >= delta_x_zp) return times[i];
    }
    return std::nullopt;
}

}  // namespace snosc
