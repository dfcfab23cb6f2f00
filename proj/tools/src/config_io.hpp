#pragma once

#include "ccwb/model.hpp"
#include "ccwb/quadrature.hpp"
#include "ccwb/supremum.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ccwb::cli {

/// Search controls from the "supremum" config section. h_max 0 and an unset
/// sign mode mean "pick the model-dependent default".
struct SupremumSettings {
    int h_max = 0;
    std::optional<SignMode> sign_mode;
    double tol = 1e-9;
};

/// Monte Carlo controls from the "experiment" section. An empty grid means
/// the reference -20..15 dB grid.
struct ExperimentSettings {
    int runs = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<double> snr_grid_db;
};

struct LoadedConfig {
    ModelConfig model;
    QuadratureSpec quad;
    SupremumSettings sup;
    ExperimentSettings experiment;
    bool beta_defaulted = false;  ///< beta absent from the file, 1.0 assumed
    bool tau_defaulted = false;   ///< tau absent, tau_max(T, K) assumed
};

/// Parses and validates one JSON config document (sections model, quadrature,
/// supremum, experiment; only model is required). Unknown keys warn on
/// stderr. Throws ConfigError with the parse location on malformed JSON and
/// with the offending key path on invalid values.
LoadedConfig load_config_file(const std::string& path);

LoadedConfig config_from_json(const nlohmann::json& doc);

/// The effective configuration after defaults, as embedded in manifests.
nlohmann::json config_snapshot(const LoadedConfig& config);

const char* sign_mode_name(SignMode mode);
SignMode parse_sign_mode(const std::string& name);

} // namespace ccwb::cli
