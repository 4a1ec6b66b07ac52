// snosc: simulator and stability analyzer for a levitated harmonic oscillator
// with square-wave trap-frequency modulation and an optional Schrodinger-Newton
// self-gravity term.
//
// Subcommands: omega-sn, simulate, stability-map, delta-envelope,
// asymptotic-delta, trap-exit, mc-verify. All take --config FILE plus
// --set key=value overrides; data files are CSV, reports are JSON.
// Exit codes: 0 success, 1 usage/config error, 2 numerical divergence
// (partial output retained).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "snosc/analysis.hpp"
#include "snosc/config.hpp"
#include "snosc/csv.hpp"
#include "snosc/first_moments.hpp"
#include "snosc/floquet.hpp"
#include "snosc/monte_carlo.hpp"
#include "snosc/propagator.hpp"

using nlohmann::json;
using namespace snosc;

namespace {

struct Cli {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    int threads = 0;
};

RunConfig load(const Cli& cli) {
    json doc = load_json_file(cli.config_path);
    for (const auto& ov : cli.overrides) apply_override(doc, ov);
    return parse_config(doc);
}

std::string out_prefix(const Cli& cli, const RunConfig& cfg, const char* fallback) {
    if (!cli.output.empty()) return cli.output;
    if (cfg.run.contains("output")) return cfg.run.at("output").get<std::string>();
    return fallback;
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << doc.dump(2) << '\n';
}

json report_to_json(const StabilityReport& rep) {
    json eig = json::array();
    for (const auto& v : rep.eigenvalues) eig.push_back({{"re", v.real()}, {"im", v.imag()}});
    return {{"eigenvalues", eig},
            {"moduli", rep.moduli},
            {"classification", to_string(rep.classification)},
            {"spectral_radius", rep.spectral_radius}};
}

int resolve_cycles(const RunConfig& cfg, const ModulationSchedule& s, int fallback) {
    if (cfg.run.contains("horizon_s")) {
        const double horizon = run_number(cfg.run, "horizon_s", 0.0);
        if (horizon <= 0.0) throw ConfigError("run.horizon_s must be > 0");
        return static_cast<int>(std::ceil(horizon / s.tau));
    }
    return run_int(cfg.run, "n_cycles", fallback);
}

void write_moment_csv(const std::string& path, const PropagationResult& res,
                      bool emit_rows = true) {
    CsvWriter csv(path, {"t", "v_xx", "v_xp", "v_pp", "w_xx", "w_xp", "w_pp", "v_xx_total",
                         "cycle_index"});
    if (!emit_rows) return;
    for (const auto& r : res.rows) {
        csv.row({r.t, r.quantum.v_xx, r.quantum.v_xp, r.quantum.v_pp, r.classical.v_xx,
                 r.classical.v_xp, r.classical.v_pp, r.v_xx_total,
                 static_cast<double>(r.cycle_index)});
    }
}

json validity_json(const PhysicalParams& p, const std::vector<double>& ts,
                   const std::vector<double>& vxx) {
    if (p.delta_x_zp <= 0.0) return {{"checked", false}};
    const auto violation = check_validity(ts, vxx, p.delta_x_zp);
    json out = {{"checked", true}, {"delta_x_zp", p.delta_x_zp}};
    if (violation) {
        out["valid"] = false;
        out["first_violation_t"] = *violation;
    } else {
        out["valid"] = true;
    }
    return out;
}

int cmd_omega_sn(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const ModulationSchedule s = make_schedule(cfg.params, cfg.alpha, cfg.beta);
    json rep = {{"omega_sn", cfg.params.omega_sn},
                {"t1", s.t1},
                {"t2", s.t2},
                {"tau", s.tau}};
    std::cout << rep.dump(2) << '\n';
    const std::string prefix = out_prefix(cli, cfg, "");
    if (!prefix.empty()) write_json(prefix + ".json", rep);
    return 0;
}

int cmd_simulate(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const ModulationSchedule s = make_schedule(cfg.params, cfg.alpha, cfg.beta);
    const int n_cycles = resolve_cycles(cfg, s, 100);
    const int substeps = run_int(cfg.run, "substeps", 64);
    const std::string prefix = out_prefix(cli, cfg, "simulate_out");

    const DeltaEnvelopeResult delta =
        delta_envelope(cfg.params, s, cfg.initial.cov0, n_cycles, substeps);
    write_moment_csv(prefix + "_nosn.csv", delta.run_no_sn, n_cycles > 0);
    write_moment_csv(prefix + "_sn.csv", delta.run_sn, n_cycles > 0);
    {
        CsvWriter csv(prefix + "_delta.csv", {"t", "v_xx_no_sn", "v_xx_sn", "delta_v_xx",
                                              "env_no_sn", "env_sn", "delta_env"});
        for (std::size_t i = 0; i < delta.t.size(); ++i) {
            csv.row({delta.t[i], delta.v_xx_no_sn[i], delta.v_xx_sn[i], delta.delta_raw[i],
                     delta.env_no_sn[i], delta.env_sn[i], delta.delta_env[i]});
        }
    }

    const SegmentPropagator l0 = cycle_map(cfg.params, s, Block::quantum, false);
    const SegmentPropagator ls = cycle_map(cfg.params, s, Block::quantum, true);
    json rep = {
        {"n_cycles", n_cycles},
        {"tau", s.tau},
        {"status_no_sn", delta.run_no_sn.status == PropagationStatus::ok ? "ok" : "diverged"},
        {"status_sn", delta.run_sn.status == PropagationStatus::ok ? "ok" : "diverged"},
        {"stability_no_sn", report_to_json(classify_stability(l0.matrix_m))},
        {"stability_sn", report_to_json(classify_stability(ls.matrix_m))},
        {"validity_no_sn", validity_json(cfg.params, delta.t, delta.v_xx_no_sn)},
        {"validity_sn", validity_json(cfg.params, delta.t, delta.v_xx_sn)},
    };
    write_json(prefix + "_report.json", rep);
    std::cout << rep.dump(2) << '\n';
    const bool diverged = delta.run_no_sn.status != PropagationStatus::ok ||
                          delta.run_sn.status != PropagationStatus::ok;
    return diverged ? 2 : 0;
}

int cmd_stability_map(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const double a0 = run_number(cfg.run, "alpha_min", 0.05);
    const double a1 = run_number(cfg.run, "alpha_max", M_PI);
    const double b0 = run_number(cfg.run, "beta_min", 0.25);
    const double b1 = run_number(cfg.run, "beta_max", 4.0);
    const int na = run_int(cfg.run, "n_alpha", 400);
    const int nb = run_int(cfg.run, "n_beta", 400);
    const std::string prefix = out_prefix(cli, cfg, "stability_map");

    const StabilityMap map =
        stability_map(cfg.params, a0, a1, b0, b1, na, nb, cli.threads);

    CsvWriter csv(prefix + ".csv", {"alpha", "beta", "class_no_sn", "class_sn", "gamma", "flags"});
    for (std::size_t i = 0; i < map.alphas.size(); ++i) {
        for (std::size_t j = 0; j < map.betas.size(); ++j) {
            csv.row_mixed({format_double(map.alphas[i]), format_double(map.betas[j]),
                           to_string(map.no_sn(i, j)), to_string(map.sn(i, j)),
                           format_double(map.gamma_m),
                           map.f_terms_neglected ? "f_terms_neglected" : ""});
        }
    }
    json meta = {{"alpha_min", a0},      {"alpha_max", a1},
                 {"beta_min", b0},       {"beta_max", b1},
                 {"n_alpha", na},        {"n_beta", nb},
                 {"gamma_m", map.gamma_m}, {"omega_sn", cfg.params.omega_sn},
                 {"f_terms_neglected", map.f_terms_neglected}};
    write_json(prefix + ".json", meta);
    std::cout << meta.dump(2) << '\n';
    return 0;
}

int cmd_delta_envelope(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const ModulationSchedule s = make_schedule(cfg.params, cfg.alpha, cfg.beta);
    const int n_cycles = resolve_cycles(cfg, s, 100);
    const int substeps = run_int(cfg.run, "substeps", 64);
    const std::string prefix = out_prefix(cli, cfg, "delta_envelope");

    const DeltaEnvelopeResult delta =
        delta_envelope(cfg.params, s, cfg.initial.cov0, n_cycles, substeps);
    CsvWriter csv(prefix + ".csv", {"t", "v_xx_no_sn", "v_xx_sn", "delta_v_xx", "env_no_sn",
                                    "env_sn", "delta_env"});
    for (std::size_t i = 0; i < delta.t.size(); ++i) {
        csv.row({delta.t[i], delta.v_xx_no_sn[i], delta.v_xx_sn[i], delta.delta_raw[i],
                 delta.env_no_sn[i], delta.env_sn[i], delta.delta_env[i]});
    }
    double max_abs = 0.0, max_signed = 0.0;
    for (const double d : delta.delta_env) {
        max_abs = std::max(max_abs, std::abs(d));
        max_signed = std::max(max_signed, d);
    }
    json rep = {{"final_delta_env", delta.delta_env.empty() ? 0.0 : delta.delta_env.back()},
                {"max_abs_delta_env", max_abs},
                {"max_delta_env", max_signed},
                {"status_no_sn", delta.run_no_sn.status == PropagationStatus::ok ? "ok" : "diverged"},
                {"status_sn", delta.run_sn.status == PropagationStatus::ok ? "ok" : "diverged"}};
    write_json(prefix + "_report.json", rep);
    std::cout << rep.dump(2) << '\n';
    const bool diverged = delta.run_no_sn.status != PropagationStatus::ok ||
                          delta.run_sn.status != PropagationStatus::ok;
    return diverged ? 2 : 0;
}

int cmd_asymptotic_delta(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const ModulationSchedule s = make_schedule(cfg.params, cfg.alpha, cfg.beta);
    const int substeps = run_int(cfg.run, "substeps", 64);
    const std::string prefix = out_prefix(cli, cfg, "asymptotic_delta");
    try {
        const AsymptoticDeltaResult res = asymptotic_delta(cfg.params, s, substeps);
        json rep = {{"delta_inf", res.delta_inf},
                    {"env_max_no_sn", res.env_max_no_sn},
                    {"env_max_sn", res.env_max_sn},
                    {"stability_no_sn", report_to_json(res.report_no_sn)},
                    {"stability_sn", report_to_json(res.report_sn)}};
        write_json(prefix + ".json", rep);
        std::cout << rep.dump(2) << '\n';
        return 0;
    } catch (const AsymptoticUnstableError& e) {
        json rep = {{"error", e.what()},
                    {"stability_no_sn", report_to_json(e.report_no_sn)},
                    {"stability_sn", report_to_json(e.report_sn)}};
        std::cerr << rep.dump(2) << '\n';
        return 1;
    }
}

int cmd_trap_exit(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const ModulationSchedule s = make_schedule(cfg.params, cfg.alpha, cfg.beta);
    const double t_max = run_number(cfg.run, "t_max", 30.0);
    const int substeps = run_int(cfg.run, "substeps", 64);
    const std::string prefix = out_prefix(cli, cfg, "trap_exit");

    const auto exit_time = trap_exit_time(cfg.params, s, cfg.initial.mean0,
                                          cfg.initial.trap_halfwidth, t_max, substeps);
    const int n_cycles = static_cast<int>(std::ceil(t_max / s.tau));
    const auto rows = propagate_first_moments(cfg.initial.mean0, cfg.params, s,
                                              n_cycles, substeps);
    CsvWriter csv(prefix + "_mean.csv", {"t", "x_mean", "p_mean", "envelope_flag"});
    for (const auto& r : rows)
        csv.row({r.t, r.mean.x_mean, r.mean.p_mean, r.at_local_max ? 1.0 : 0.0});

    json rep = {{"trap_halfwidth", cfg.initial.trap_halfwidth}, {"t_max", t_max}};
    if (exit_time) {
        rep["confined"] = false;
        rep["exit_time"] = *exit_time;
    } else {
        rep["confined"] = true;
    }
    write_json(prefix + ".json", rep);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_mc_verify(const Cli& cli) {
    RunConfig cfg = load(cli);
    check_run_keys(cfg.run, known_run_keys());
    const ModulationSchedule s = make_schedule(cfg.params, cfg.alpha, cfg.beta);

    EnsembleSpec spec;
    spec.params = cfg.params;
    spec.schedule = s;
    spec.n_trajectories = run_int(cfg.run, "n_trajectories", 10000);
    spec.n_cycles = run_int(cfg.run, "n_cycles", 20);
    spec.seed = static_cast<std::uint64_t>(run_int(cfg.run, "seed", 42));
    spec.include_sn = cfg.run.contains("include_sn") ? cfg.run.at("include_sn").get<bool>() : true;
    const double divisor = run_number(cfg.run, "dt_divisor", 8000.0);
    spec.dt = run_number(cfg.run, "dt", std::min(s.t1, s.t2) / divisor);
    const std::string prefix = out_prefix(cli, cfg, "mc_verify");

    const EnsembleResult mc = run_ensemble(spec, cfg.initial, cli.threads);

    // deterministic counterpart at cycle boundaries
    SecondMomentSystem sys{cfg.initial.cov0, {}};
    const PropagationResult det =
        propagate_second_moments(sys, cfg.params, s, spec.include_sn, spec.n_cycles, 1);

    CsvWriter csv(prefix + ".csv", {"t", "v_xx_hat", "v_xx_stderr", "v_xp_hat", "v_xp_stderr",
                                    "v_pp_hat", "v_pp_stderr", "n_traj", "seed"});
    double worst = 0.0;
    json flagged = json::array();
    for (std::size_t k = 0; k < mc.rows.size(); ++k) {
        const EnsembleRow& r = mc.rows[k];
        csv.row({r.t, r.v_xx_hat, r.v_xx_stderr, r.v_xp_hat, r.v_xp_stderr, r.v_pp_hat,
                 r.v_pp_stderr, static_cast<double>(mc.n_trajectories),
                 static_cast<double>(mc.seed)});
        // deterministic rows: 2 substeps per cycle, boundaries at even indices
        const MomentSeriesRow& drow = det.rows[2 * k];
        const CovarianceState tot = drow.quantum + drow.classical;
        const double checks[3][3] = {{tot.v_xx, r.v_xx_hat, r.v_xx_stderr},
                                     {tot.v_xp, r.v_xp_hat, r.v_xp_stderr},
                                     {tot.v_pp, r.v_pp_hat, r.v_pp_stderr}};
        for (const auto& c : checks) {
            if (c[2] <= 0.0) continue;
            const double z = std::abs(c[0] - c[1]) / c[2];
            worst = std::max(worst, z);
            if (z > 4.0) flagged.push_back({{"t", r.t}, {"z", z}});
        }
    }
    json rep = {{"max_abs_z", worst},
                {"n_trajectories", mc.n_trajectories},
                {"seed", mc.seed},
                {"dt", spec.dt},
                {"flagged", flagged}};
    write_json(prefix + "_report.json", rep);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

const char* kConfigHelp = R"(Configuration file (JSON, strict schema; unknown keys are errors):
  params:   M [kg], omega [rad/s], gamma_m [1/s], T_bath [K], m_atom [kg],
            delta_x_zp [m], omega_sn [rad/s], hbar [J s], k_B [J/K],
            G_newton [m^3/(kg s^2)], unit_mode ("SI" | "dimensionless").
            omega_sn may be given directly (wins) or derived from
            G_newton, m_atom, delta_x_zp.
  schedule: alpha [dimensionless phase], beta [frequency ratio].
  initial:  mean0 {x_mean [m], p_mean [kg m/s]},
            cov0 {v_xx [m^2], v_xp [kg m^2/s], v_pp [kg^2 m^2/s^2]}
            (default: ground state of the bare trap),
            trap_halfwidth [m] (default 1e-3).
  run:      command-specific keys, see each subcommand's help.
)";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("snosc: modulated levitated-oscillator moment simulator and "
                             "Floquet stability analyzer\n\n") + kConfigHelp};
    app.require_subcommand(1);

    Cli cli;
    app.add_option("--config", cli.config_path, "JSON configuration file")->required();
    app.add_option("--set", cli.overrides,
                   "override a config key, e.g. --set schedule.alpha=1.911 (repeatable; wins "
                   "over the file)");
    app.add_option("--output", cli.output, "output path prefix (wins over run.output)");
    app.add_option("--threads", cli.threads,
                   "max worker threads (default: hardware); results identical for any value");

    auto* c1 = app.add_subcommand(
        "omega-sn", "derive omega_sn [rad/s] and segment times t1, t2, tau [s]\n"
                    "run keys: output");
    auto* c2 = app.add_subcommand(
        "simulate", "second-moment time series with and without self-gravity\n"
                    "run keys: n_cycles | horizon_s [s], substeps (default 64), output");
    auto* c3 = app.add_subcommand(
        "stability-map", "(alpha, beta) monodromy classification grid\n"
                         "run keys: alpha_min/alpha_max [phase], beta_min/beta_max [ratio],\n"
                         "n_alpha, n_beta (default 400x400), output");
    auto* c4 = app.add_subcommand(
        "delta-envelope", "envelope difference of V_xx without minus with self-gravity\n"
                          "run keys: n_cycles | horizon_s [s], substeps, output");
    auto* c5 = app.add_subcommand(
        "asymptotic-delta", "asymptotic envelope difference from per-cycle fixed points\n"
                            "run keys: substeps, output");
    auto* c6 = app.add_subcommand(
        "trap-exit", "first time |<x>| [m] exceeds the trap halfwidth\n"
                     "run keys: t_max [s] (default 30), substeps, output");
    auto* c7 = app.add_subcommand(
        "mc-verify", "Euler-Maruyama ensemble vs deterministic moments\n"
                     "run keys: n_trajectories (default 10000), dt [s] | dt_divisor (default "
                     "8000),\nseed, n_cycles (default 20), include_sn, output");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (c1->parsed()) return cmd_omega_sn(cli);
        if (c2->parsed()) return cmd_simulate(cli);
        if (c3->parsed()) return cmd_stability_map(cli);
        if (c4->parsed()) return cmd_delta_envelope(cli);
        if (c5->parsed()) return cmd_asymptotic_delta(cli);
        if (c6->parsed()) return cmd_trap_exit(cli);
        if (c7->parsed()) return cmd_mc_verify(cli);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
