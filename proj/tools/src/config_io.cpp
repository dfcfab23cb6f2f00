#include "config_io.hpp"

#include "ccwb/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace ccwb::cli {

namespace {

using nlohmann::json;

void warn_unknown_keys(const json& section, const char* name,
                       const std::set<std::string>& known) {
    for (const auto& item : section.items()) {
        if (known.count(item.key()) == 0) {
            std::fprintf(stderr, "warning: config: unknown key \"%s\" in section \"%s\"\n",
                         item.key().c_str(), name);
        }
    }
}

const json& require_section(const json& doc, const char* name) {
    auto it = doc.find(name);
    if (it == doc.end()) throw ConfigError(std::string("config: section \"") + name + "\" is required");
    if (!it->is_object()) throw ConfigError(std::string("config: section \"") + name + "\" must be an object");
    return *it;
}

template <typename T>
T require_number(const json& section, const char* sec, const char* key) {
    auto it = section.find(key);
    if (it == section.end()) {
        throw ConfigError(std::string("config: ") + sec + "." + key + " is required");
    }
    if (!it->is_number()) {
        throw ConfigError(std::string("config: ") + sec + "." + key + " must be a number");
    }
    return it->get<T>();
}

template <typename T>
T number_or(const json& section, const char* sec, const char* key, T fallback,
            bool* present = nullptr) {
    auto it = section.find(key);
    if (it == section.end()) {
        if (present) *present = false;
        return fallback;
    }
    if (!it->is_number()) {
        throw ConfigError(std::string("config: ") + sec + "." + key + " must be a number");
    }
    if (present) *present = true;
    return it->get<T>();
}

std::vector<double> require_number_array(const json& section, const char* sec, const char* key) {
    auto it = section.find(key);
    if (it == section.end()) {
        throw ConfigError(std::string("config: ") + sec + "." + key + " is required");
    }
    if (!it->is_array()) {
        throw ConfigError(std::string("config: ") + sec + "." + key + " must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : *it) {
        if (!v.is_number()) {
            throw ConfigError(std::string("config: ") + sec + "." + key + " must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

void parse_model(const json& doc, LoadedConfig& out) {
    const json& m = require_section(doc, "model");
    warn_unknown_keys(m, "model", {"T", "K", "tau", "alphas", "beta"});
    out.model.T = require_number<int>(m, "model", "T");
    out.model.K = require_number<int>(m, "model", "K");
    out.model.alphas = require_number_array(m, "model", "alphas");
    bool has_beta = false;
    out.model.beta = number_or<double>(m, "model", "beta", 1.0, &has_beta);
    out.beta_defaulted = !has_beta;
    bool has_tau = false;
    out.model.tau = number_or<int>(m, "model", "tau", 0, &has_tau);
    out.tau_defaulted = !has_tau;
    if (!has_tau) {
        if (out.model.T <= out.model.K || out.model.K < 1) {
            throw ConfigError("config: model.tau default needs 1 <= K < T");
        }
        out.model.tau = tau_max(out.model.T, out.model.K);
    }
    require_valid(out.model);
}

void parse_quadrature(const json& doc, LoadedConfig& out) {
    auto it = doc.find("quadrature");
    if (it == doc.end()) return;
    const json& q = *it;
    if (!q.is_object()) throw ConfigError("config: section \"quadrature\" must be an object");
    warn_unknown_keys(q, "quadrature",
                      {"rel_tol", "abs_tol", "max_evaluations", "truncation_quantile"});
    out.quad.rel_tol = number_or<double>(q, "quadrature", "rel_tol", out.quad.rel_tol);
    out.quad.abs_tol = number_or<double>(q, "quadrature", "abs_tol", out.quad.abs_tol);
    out.quad.max_evaluations =
        number_or<long long>(q, "quadrature", "max_evaluations", out.quad.max_evaluations);
    out.quad.truncation_quantile =
        number_or<double>(q, "quadrature", "truncation_quantile", out.quad.truncation_quantile);
    if (!(out.quad.rel_tol > 0.0) || !(out.quad.abs_tol >= 0.0)) {
        throw ConfigError("config: quadrature tolerances must be positive");
    }
    if (!(out.quad.truncation_quantile > 0.5 && out.quad.truncation_quantile < 1.0)) {
        throw ConfigError("config: quadrature.truncation_quantile must lie in (0.5, 1)");
    }
}

void parse_supremum(const json& doc, LoadedConfig& out) {
    auto it = doc.find("supremum");
    if (it == doc.end()) return;
    const json& s = *it;
    if (!s.is_object()) throw ConfigError("config: section \"supremum\" must be an object");
    warn_unknown_keys(s, "supremum", {"h_max", "sign_mode", "tol"});
    out.sup.h_max = number_or<int>(s, "supremum", "h_max", 0);
    out.sup.tol = number_or<double>(s, "supremum", "tol", out.sup.tol);
    if (!(out.sup.tol > 0.0)) throw ConfigError("config: supremum.tol must be positive");
    auto sm = s.find("sign_mode");
    if (sm != s.end()) {
        if (!sm->is_string()) throw ConfigError("config: supremum.sign_mode must be a string");
        out.sup.sign_mode = parse_sign_mode(sm->get<std::string>());
    }
}

void parse_experiment(const json& doc, LoadedConfig& out) {
    auto it = doc.find("experiment");
    if (it == doc.end()) return;
    const json& e = *it;
    if (!e.is_object()) throw ConfigError("config: section \"experiment\" must be an object");
    warn_unknown_keys(e, "experiment",
                      {"runs", "seed", "threads", "snr_grid_db", "snr_start", "snr_stop", "snr_step"});
    out.experiment.runs = number_or<int>(e, "experiment", "runs", out.experiment.runs);
    out.experiment.seed =
        number_or<std::uint64_t>(e, "experiment", "seed", out.experiment.seed);
    out.experiment.threads = number_or<int>(e, "experiment", "threads", out.experiment.threads);
    if (out.experiment.runs < 1) throw ConfigError("config: experiment.runs must be >= 1");
    if (out.experiment.threads < 1) throw ConfigError("config: experiment.threads must be >= 1");
    auto grid = e.find("snr_grid_db");
    if (grid != e.end()) {
        out.experiment.snr_grid_db = require_number_array(e, "experiment", "snr_grid_db");
        if (out.experiment.snr_grid_db.empty()) {
            throw ConfigError("config: experiment.snr_grid_db must not be empty");
        }
        return;
    }
    if (e.find("snr_start") != e.end() || e.find("snr_stop") != e.end() ||
        e.find("snr_step") != e.end()) {
        double start = require_number<double>(e, "experiment", "snr_start");
        double stop = require_number<double>(e, "experiment", "snr_stop");
        double step = require_number<double>(e, "experiment", "snr_step");
        if (!(step > 0.0) || stop < start) {
            throw ConfigError("config: experiment SNR range needs snr_step > 0 and snr_stop >= snr_start");
        }
        if ((stop - start) / step > 10000.0) {
            throw ConfigError("config: experiment SNR range has more than 10000 points");
        }
        for (double v = start; v <= stop + 1e-9; v += step) {
            out.experiment.snr_grid_db.push_back(v);
        }
    }
}

} // namespace

SignMode parse_sign_mode(const std::string& name) {
    if (name == "positive") return SignMode::positive;
    if (name == "all") return SignMode::all_signs;
    throw ConfigError("config: sign_mode must be \"positive\" or \"all\", got \"" + name + "\"");
}

const char* sign_mode_name(SignMode mode) {
    return mode == SignMode::positive ? "positive" : "all";
}

LoadedConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
    warn_unknown_keys(doc, "(top level)", {"model", "quadrature", "supremum", "experiment"});
    LoadedConfig out;
    parse_model(doc, out);
    parse_quadrature(doc, out);
    parse_supremum(doc, out);
    parse_experiment(doc, out);
    if (out.sup.h_max != 0 && (out.sup.h_max < 1 || out.sup.h_max > out.model.tau - 1)) {
        throw ConfigError("config: supremum.h_max must lie in [1, tau-1]");
    }
    return out;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open \"" + path + "\"");
    json doc;
    try {
        // exceptions carry "at line L, column C" for malformed documents
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + path + ": " + e.what());
    }
    return config_from_json(doc);
}

nlohmann::json config_snapshot(const LoadedConfig& config) {
    json snap;
    snap["model"] = {{"T", config.model.T},
                     {"K", config.model.K},
                     {"tau", config.model.tau},
                     {"alphas", config.model.alphas},
                     {"beta", config.model.beta}};
    snap["quadrature"] = {{"rel_tol", config.quad.rel_tol},
                          {"abs_tol", config.quad.abs_tol},
                          {"max_evaluations", config.quad.max_evaluations},
                          {"truncation_quantile", config.quad.truncation_quantile}};
    json sup = {{"h_max", config.sup.h_max}, {"tol", config.sup.tol}};
    if (config.sup.sign_mode) sup["sign_mode"] = sign_mode_name(*config.sup.sign_mode);
    snap["supremum"] = sup;
    snap["experiment"] = {{"runs", config.experiment.runs},
                          {"seed", config.experiment.seed},
                          {"threads", config.experiment.threads},
                          {"snr_grid_db", config.experiment.snr_grid_db}};
    snap["defaults_applied"] = {{"beta", config.beta_defaulted}, {"tau", config.tau_defaulted}};
    return snap;
}

} // namespace ccwb::cli
