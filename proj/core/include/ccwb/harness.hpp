#pragma once

#include "ccwb/model.hpp"
#include "ccwb/quadrature.hpp"
#include "ccwb/supremum.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ccwb {

/// Empirical global MSE over Monte Carlo draws of (parameters, data).
/// Row/column order matches the bound: lambda_1..lambda_{K+1}, t_1..t_K.
struct GmseReport {
    Eigen::MatrixXd gmse;
    std::vector<double> grmse_t;         ///< sqrt of the changepoint diagonal entries
    std::vector<double> grmse_lambda;    ///< sqrt of the rate diagonal entries
    std::vector<double> grmse_t_stderr;  ///< batched MC standard errors (NaN when runs < 2)
    int runs = 0;
    std::uint64_t seed = 0;
};

struct SweepPoint {
    double snr_db = 0.0;
    double alpha2 = 0.0;
    double bound_t1 = 0.0;
    double grmse_t1 = 0.0;
    double grmse_t1_stderr = 0.0;
    std::vector<double> bound_lambda;
    std::vector<double> grmse_lambda;
    bool ok = false;
    std::string status;  ///< "ok" or the failing stage's message
};

struct EstimateOut {
    std::vector<double> lambdas;
    std::vector<int> locations;
};

/// Estimator hook. The truth argument lets tests inject oracle estimators;
/// the default ignores it and runs the exhaustive MAP search.
using EstimatorFn =
    std::function<EstimateOut(const ModelConfig&, const Dataset&, const ParameterDraw&)>;

/// Monte Carlo GMSE: draws (theta, x) from the joint prior `runs` times,
/// estimates theta, and averages outer products of the error vector.
/// Per-run RNG substreams derive from (seed, run index), so the report is
/// identical for any thread count.
GmseReport estimate_gmse(const ModelConfig& config, int runs, std::uint64_t seed,
                         int threads = 1, const EstimatorFn& estimator = nullptr);

struct SweepOptions {
    int h_max = 0;                       ///< 0 selects default_h_max
    std::optional<SignMode> sign_mode;   ///< unset selects default_sign_mode
    double sup_tol = 1e-9;
    int threads = 1;
};

/// SNR grid of the reference experiment: -20..15 dB in 1 dB steps.
std::vector<double> default_snr_grid();

/// For each grid point sets alpha_2 = alpha_1 (1 + sqrt(10^(dB/10))), computes
/// the supremum bound and the Monte Carlo GMSE, and emits one SweepPoint.
/// Component failures flag the point and the sweep continues.
std::vector<SweepPoint> snr_sweep(const ModelConfig& base_config,
                                  const std::vector<double>& snr_grid_db, int runs,
                                  std::uint64_t seed, const QuadratureSpec& quad,
                                  const SweepOptions& options);

} // namespace ccwb
