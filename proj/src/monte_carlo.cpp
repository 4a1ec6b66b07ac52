#include "snosc/monte_carlo.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "snosc/propagator.hpp"

namespace snosc {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256++, seeded via splitmix64 so trajectory streams are independent.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0xA0761D6478BD642FULL * (stream + 1));
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() {  // (0, 1]
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct SegmentStep {
    int n_steps;
    double dt;
    double drift_xx, drift_xp, drift_px, drift_pp;  // I + A dt
    double noise_std;
};

SegmentStep make_step(const PhysicalParams& p, double omega_t, double t_seg, double dt_req) {
    SegmentStep st;
    st.n_steps = std::max(1, static_cast<int>(std::ceil(t_seg / dt_req)));
    st.dt = t_seg / st.n_steps;
    st.drift_xx = 1.0;
    st.drift_xp = st.dt / p.M;
    st.drift_px = -p.M * omega_t * omega_t * st.dt;
    st.drift_pp = 1.0 - p.gamma_m * st.dt;
    st.noise_std = std::sqrt(p.thermal_drive() * st.dt);
    return st;
}

struct Moments {
    double m_x, m_p, c_xx, c_xp, c_pp;
};

Moments sample_covariance(const std::vector<double>& xs, const std::vector<double>& ps) {
    const std::size_t n = xs.size();
    double sx = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sp += ps[i];
    }
    const double mx = sx / n, mp = sp / n;
    double cxx = 0.0, cxp = 0.0, cpp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx, dp = ps[i] - mp;
        cxx += dx * dx;
        cxp += dx * dp;
        cpp += dp * dp;
    }
    const double norm = 1.0 / (n - 1);
    return {mx, mp, cxx * norm, cxp * norm, cpp * norm};
}

/// Jackknife standard error of the sample covariance of (a, b).
double jackknife_stderr(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n < 3) return 0.0;
    double sa = 0.0, sb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += a[i];
        sb += b[i];
        sab += a[i] * b[i];
    }
    std::vector<double> loo(n);
    double mean_loo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sa_i = sa - a[i];
        const double sb_i = sb - b[i];
        const double sab_i = sab - a[i] * b[i];
        loo[i] = (sab_i - sa_i * sb_i / (n - 1)) / (n - 2);
        mean_loo += loo[i];
    }
    mean_loo /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (loo[i] - mean_loo) * (loo[i] - mean_loo);
    return std::sqrt(ss * (n - 1) / n);
}

}  // namespace

void EnsembleSpec::validate() const {
    params.validate();
    if (n_trajectories < 100)
        throw std::domain_error("ensemble: n_trajectories must be >= 100");
    const double cap = std::min(schedule.t1, schedule.t2) / 200.0;
    if (!(dt > 0.0) || dt > cap)
        throw std::domain_error("ensemble: dt must be in (0, min(t1,t2)/200]");
    if (n_cycles < 1) throw std::domain_error("ensemble: n_cycles must be >= 1");
}

EnsembleResult run_ensemble(const EnsembleSpec& spec, const InitialConditions& initial,
                            int n_threads) {
    spec.validate();
    initial.validate(spec.params);
    const PhysicalParams& p = spec.params;
    const ModulationSchedule& s = spec.schedule;
    const int n_out = spec.n_cycles + 1;
    const int n_traj = spec.n_trajectories;

    const SegmentStep step1 = make_step(p, p.omega, s.t1, spec.dt);
    const SegmentStep step2 = make_step(p, s.beta * p.omega, s.t2, spec.dt);

    // per-output-time trajectory states, filled in disjoint slices per thread
    std::vector<std::vector<double>> xs(n_out, std::vector<double>(n_traj));
    std::vector<std::vector<double>> ps(n_out, std::vector<double>(n_traj));

    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            Rng rng(spec.seed, static_cast<std::uint64_t>(i));
            double x = initial.mean0.x_mean;
            double px = initial.mean0.p_mean;
            xs[0][i] = x;
            ps[0][i] = px;
            for (int cycle = 0; cycle < spec.n_cycles; ++cycle) {
                for (const SegmentStep* st : {&step1, &step2}) {
                    for (int k = 0; k < st->n_steps; ++k) {
                        const double xn = st->drift_xx * x + st->drift_xp * px;
                        const double pn = st->drift_px * x + st->drift_pp * px +
                                          st->noise_std * rng.gaussian();
                        x = xn;
                        px = pn;
                    }
                }
                if (!std::isfinite(x) || !std::isfinite(px))
                    throw std::runtime_error("ensemble: trajectory " + std::to_string(i) +
                                             " non-finite at cycle " + std::to_string(cycle + 1));
                xs[cycle + 1][i] = x;
                ps[cycle + 1][i] = px;
            }
        }
    };

    int hw = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    hw = std::min(hw, n_traj);
    if (hw == 1) {
        worker(0, n_traj);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_traj + hw - 1) / hw;
        for (int t = 0; t < hw; ++t) {
            const int b = t * chunk;
            const int e = std::min(n_traj, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    // deterministic quantum block advanced by the exact cycle map
    const SegmentPropagator qcycle = cycle_map(p, s, Block::quantum, spec.include_sn);
    Eigen::Vector3d q = initial.cov0.vec();

    EnsembleResult res;
    res.n_trajectories = n_traj;
    res.seed = spec.seed;
    res.rows.reserve(n_out);
    for (int k = 0; k < n_out; ++k) {
        if (k > 0) q = qcycle.matrix_m * q + qcycle.drive_d;
        const Moments m = sample_covariance(xs[k], ps[k]);
        EnsembleRow row;
        row.t = k * s.tau;
        row.v_xx_hat = q[0] + m.c_xx;
        row.v_xp_hat = q[1] + m.c_xp;
        row.v_pp_hat = q[2] + m.c_pp;
        row.v_xx_stderr = jackknife_stderr(xs[k], xs[k]);
        row.v_xp_stderr = jackknife_stderr(xs[k], ps[k]);
        row.v_pp_stderr = jackknife_stderr(ps[k], ps[k]);
        row.x_mean_hat = m.m_x;
        row.p_mean_hat = m.m_p;
        res.rows.push_back(row);
    }
    return res;
}

}  // namespace snosc
