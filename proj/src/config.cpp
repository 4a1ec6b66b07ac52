#include "snosc/config.hpp"

#include <fstream>
#include <set>

namespace snosc {

using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return doc;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must look like path.to.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // unquoted strings
    }

    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (key.empty()) throw ConfigError("override has an empty path component: " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

namespace {

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(path + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) throw ConfigError("unknown key: " + path + "." + item.key());
    }
}

double number_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + "." + key + " must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key,
                 double fallback) {
    if (!obj.contains(key)) return fallback;
    return number_at(obj, path, key);
}

}  // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, "config", {"params", "schedule", "initial", "run"});
    if (!doc.contains("params")) throw ConfigError("missing required section: config.params");
    if (!doc.contains("schedule")) throw ConfigError("missing required section: config.schedule");

    RunConfig cfg;
    const json& jp = doc.at("params");
    reject_unknown(jp, "params",
                   {"unit_mode", "M", "omega", "gamma_m", "T_bath", "m_atom", "delta_x_zp",
                    "omega_sn", "hbar", "k_B", "G_newton"});

    PhysicalParams& p = cfg.params;
    const std::string mode = jp.contains("unit_mode") ? jp.at("unit_mode").get<std::string>() : "SI";
    if (mode == "SI") {
        p.unit_mode = UnitMode::si;
    } else if (mode == "dimensionless") {
        p.unit_mode = UnitMode::dimensionless;
        p.hbar = 1.0;
        p.k_B = 1.0;
        p.G_newton = 1.0;
        p.M = 1.0;
        p.omega = 1.0;
    } else {
        throw ConfigError("params.unit_mode must be \"SI\" or \"dimensionless\"");
    }

    p.M = number_or(jp, "params", "M", p.M);
    p.omega = number_or(jp, "params", "omega", p.omega);
    if (p.M <= 0.0 && mode == "SI") throw ConfigError("params.M is required in SI mode");
    if (p.omega <= 0.0 && mode == "SI") throw ConfigError("params.omega is required in SI mode");
    p.gamma_m = number_or(jp, "params", "gamma_m", 0.0);
    p.T_bath = number_or(jp, "params", "T_bath", 0.0);
    p.m_atom = number_or(jp, "params", "m_atom", 0.0);
    p.delta_x_zp = number_or(jp, "params", "delta_x_zp", 0.0);
    p.hbar = number_or(jp, "params", "hbar", p.hbar);
    p.k_B = number_or(jp, "params", "k_B", p.k_B);
    p.G_newton = number_or(jp, "params", "G_newton", p.G_newton);

    if (jp.contains("omega_sn")) {
        // a directly supplied value wins over the derived one
        p.omega_sn = number_at(jp, "params", "omega_sn");
    } else if (p.m_atom > 0.0) {
        if (p.delta_x_zp <= 0.0)
            throw ConfigError("params.delta_x_zp is required to derive omega_sn from m_atom");
        p.omega_sn = compute_omega_sn(p.G_newton, p.m_atom, p.delta_x_zp);
    } else {
        throw ConfigError(
            "missing fields: params.omega_sn and params.m_atom (supply omega_sn directly, or "
            "m_atom with delta_x_zp to derive it)");
    }
    try {
        p.validate();
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }

    const json& js = doc.at("schedule");
    reject_unknown(js, "schedule", {"alpha", "beta"});
    cfg.alpha = number_at(js, "schedule", "alpha");
    cfg.beta = number_at(js, "schedule", "beta");

    cfg.initial.mean0 = {0.0, 0.0};
    cfg.initial.cov0 = ground_state_covariance(p);
    cfg.initial.trap_halfwidth = 1e-3;
    if (doc.contains("initial")) {
        const json& ji = doc.at("initial");
        reject_unknown(ji, "initial", {"mean0", "cov0", "trap_halfwidth"});
        if (ji.contains("mean0")) {
            const json& jm = ji.at("mean0");
            reject_unknown(jm, "initial.mean0", {"x_mean", "p_mean"});
            cfg.initial.mean0.x_mean = number_or(jm, "initial.mean0", "x_mean", 0.0);
            cfg.initial.mean0.p_mean = number_or(jm, "initial.mean0", "p_mean", 0.0);
        }
        if (ji.contains("cov0")) {
            const json& jc = ji.at("cov0");
            reject_unknown(jc, "initial.cov0", {"v_xx", "v_xp", "v_pp"});
            cfg.initial.cov0.v_xx = number_at(jc, "initial.cov0", "v_xx");
            cfg.initial.cov0.v_xp = number_or(jc, "initial.cov0", "v_xp", 0.0);
            cfg.initial.cov0.v_pp = number_at(jc, "initial.cov0", "v_pp");
            cfg.has_explicit_cov0 = true;
        }
        cfg.initial.trap_halfwidth = number_or(ji, "initial", "trap_halfwidth", 1e-3);
    }
    try {
        cfg.initial.validate(p);
    } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
    }

    if (doc.contains("run")) {
        if (!doc.at("run").is_object()) throw ConfigError("config.run must be a JSON object");
        cfg.run = doc.at("run");
    }
    return cfg;
}

void check_run_keys(const json& run, const std::vector<std::string>& allowed) {
    std::set<std::string> set(allowed.begin(), allowed.end());
    for (const auto& item : run.items()) {
        if (!set.count(item.key())) throw ConfigError("unknown key: run." + item.key());
    }
}

double run_number(const json& run, const std::string& key, double fallback) {
    if (!run.contains(key)) return fallback;
    const json& v = run.at(key);
    if (!v.is_number()) throw ConfigError("run." + key + " must be a number");
    return v.get<double>();
}

int run_int(const json& run, const std::string& key, int fallback) {
    if (!run.contains(key)) return fallback;
    const json& v = run.at(key);
    if (!v.is_number_integer()) throw ConfigError("run." + key + " must be an integer");
    return v.get<int>();
}

}  // namespace snosc
