#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "snosc/params.hpp"

namespace snosc {

/// Configuration or schema violation; the message carries the JSON path of
/// the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parsed run configuration. `run` holds command-specific options and is
/// validated per command against an allowed-key list.
struct RunConfig {
    PhysicalParams params;
    double alpha = 0.0;
    double beta = 0.0;
    InitialConditions initial;
    bool has_explicit_cov0 = false;
    nlohmann::json run = nlohmann::json::object();
};

nlohmann::json load_json_file(const std::string& path);

/// Applies one "dotted.path=value" override; the value is parsed as a JSON
/// literal, falling back to a string. Overrides win over the config file.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Strict parse: unknown keys anywhere are ConfigError with the field path.
/// omega_sn may be given directly (wins) or derived from
/// (G_newton, m_atom, delta_x_zp); if both omega_sn and m_atom are missing
/// the error names both fields.
RunConfig parse_config(const nlohmann::json& doc);

/// Rejects keys of `run` outside `allowed` (ConfigError naming the path).
void check_run_keys(const nlohmann::json& run, const std::vector<std::string>& allowed);

/// The full set of run keys any command understands. Commands validate
/// against this union so a single config file can drive several subcommands
/// while typos still fail loudly.
const std::vector<std::string>& known_run_keys();

double run_number(const nlohmann::json& run, const std::string& key, double fallback);
int run_int(const nlohmann::json& run, const std::string& key, int fallback);

}  // namespace snosc
