#pragma once

#include "ccwb/estimator.hpp"
#include "ccwb/harness.hpp"
#include "ccwb/model.hpp"
#include "ccwb/supremum.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace ccwb::cli {

/// Provenance record written next to every output file. The CSV itself stays
/// byte-identical across reruns; timestamps live only here.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::uint64_t seed = 0;
    std::string version;
    std::string started_utc;
    std::string finished_utc;
    nlohmann::json config;
    nlohmann::json extra;
};

std::string utc_now();

/// Shortest round-trip decimal form; NaN renders as the absent marker "NA".
std::string fmt_double(double v);

/// Commas and line breaks become ';' so free-text status fits in one cell.
std::string csv_sanitize(const std::string& s);

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

void write_sweep_csv(const std::filesystem::path& path, const std::string& manifest_name,
                     const std::vector<SweepPoint>& points, int K);

/// Log-y plot of the Monte Carlo GRMSE and the lower bound for the first
/// changepoint against SNR. Failed or nonpositive points are left out.
void write_sweep_svg(const std::filesystem::path& path, const std::vector<SweepPoint>& points);

void write_bound_csv(const std::filesystem::path& path, const std::string& manifest_name,
                     const TightestBoundResult& result, int K);

void write_dataset_csv(const std::filesystem::path& path, const std::string& manifest_name,
                       const Dataset& data);

/// Reads a dataset CSV back ('#' comments and the header line are skipped).
/// Throws ConfigError when the row count differs from expected_T.
Dataset read_dataset_csv(const std::filesystem::path& path, int expected_T);

void write_estimate_csv(const std::filesystem::path& path, const std::string& manifest_name,
                        const MapEstimate& est);

} // namespace ccwb::cli
