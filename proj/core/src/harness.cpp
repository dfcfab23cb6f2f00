#include "ccwb/harness.hpp"

#include "ccwb/errors.hpp"
#include "ccwb/estimator.hpp"
#include "ccwb/parallel.hpp"
#include "ccwb/rng.hpp"

#include <cmath>
#include <exception>
#include <limits>

namespace ccwb {
namespace {

EstimateOut default_estimator(const ModelConfig& config, const Dataset& data,
                              const ParameterDraw&) {
    const MapEstimate est = map_changepoints(config, data);
    return EstimateOut{est.lambdas, est.locations};
}

// Standard error of sqrt(mean of sq) over `batches` contiguous batches.
double batched_rmse_stderr(const std::vector<double>& sq, int batches) {
    const int n = static_cast<int>(sq.size());
    batches = std::min(batches, n);
    if (batches < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> rmse(static_cast<size_t>(batches), 0.0);
    std::vector<int> count(static_cast<size_t>(batches), 0);
    for (int i = 0; i < n; ++i) {
        const int b = static_cast<int>(static_cast<long long>(i) * batches / n);
        rmse[static_cast<size_t>(b)] += sq[static_cast<size_t>(i)];
        ++count[static_cast<size_t>(b)];
    }
    double mean = 0.0;
    for (int b = 0; b < batches; ++b) {
        rmse[static_cast<size_t>(b)] = std::sqrt(rmse[static_cast<size_t>(b)] /
                                                 static_cast<double>(count[static_cast<size_t>(b)]));
        mean += rmse[static_cast<size_t>(b)];
    }
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (int b = 0; b < batches; ++b) {
        const double d = rmse[static_cast<size_t>(b)] - mean;
        var += d * d;
    }
    var /= static_cast<double>(batches - 1);
    return std::sqrt(var / static_cast<double>(batches));
}

} // namespace

GmseReport estimate_gmse(const ModelConfig& config, int runs, std::uint64_t seed, int threads,
                         const EstimatorFn& estimator) {
    require_valid(config);
    if (runs < 1) throw ConfigError("runs must be >= 1");
    const EstimatorFn& est = estimator ? estimator : EstimatorFn(default_estimator);

    const int d = 2 * config.K + 1;
    std::vector<Eigen::VectorXd> errors_by_run(static_cast<size_t>(runs));
    std::vector<std::exception_ptr> failures(static_cast<size_t>(runs));

    parallel_for(runs, threads, [&](int r) {
        try {
            auto engine = make_engine(seed, 1, static_cast<std::uint64_t>(r));
            const ParameterDraw truth = sample_prior(config, engine);
            const Dataset data = sample_observations(truth, config, engine);
            const EstimateOut guess = est(config, data, truth);
            if (static_cast<int>(guess.lambdas.size()) != config.K + 1 ||
                static_cast<int>(guess.locations.size()) != config.K)
                throw ConfigError("estimator returned wrong-sized estimate");
            Eigen::VectorXd e(d);
            for (int j = 0; j <= config.K; ++j)
                e(j) = truth.lambdas[static_cast<size_t>(j)] - guess.lambdas[static_cast<size_t>(j)];
            for (int k = 0; k < config.K; ++k)
                e(config.K + 1 + k) = static_cast<double>(truth.locations[static_cast<size_t>(k)] -
                                                          guess.locations[static_cast<size_t>(k)]);
            errors_by_run[static_cast<size_t>(r)] = std::move(e);
        } catch (...) {
            failures[static_cast<size_t>(r)] = std::current_exception();
        }
    });

    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    GmseReport report;
    report.runs = runs;
    report.seed = seed;
    report.gmse = Eigen::MatrixXd::Zero(d, d);
    for (const auto& e : errors_by_run) report.gmse += e * e.transpose();
    report.gmse /= static_cast<double>(runs);

    report.grmse_lambda.resize(static_cast<size_t>(config.K) + 1);
    for (int j = 0; j <= config.K; ++j)
        report.grmse_lambda[static_cast<size_t>(j)] = std::sqrt(report.gmse(j, j));

    report.grmse_t.resize(static_cast<size_t>(config.K));
    report.grmse_t_stderr.resize(static_cast<size_t>(config.K));
    std::vector<double> sq(static_cast<size_t>(runs));
    for (int k = 0; k < config.K; ++k) {
        const int idx = config.K + 1 + k;
        report.grmse_t[static_cast<size_t>(k)] = std::sqrt(report.gmse(idx, idx));
        for (int r = 0; r < runs; ++r) {
            const double v = errors_by_run[static_cast<size_t>(r)](idx);
            sq[static_cast<size_t>(r)] = v * v;
        }
        report.grmse_t_stderr[static_cast<size_t>(k)] = batched_rmse_stderr(sq, 10);
    }
    return report;
}

std::vector<double> default_snr_grid() {
    std::vector<double> grid;
    for (int db = -20; db <= 15; ++db) grid.push_back(static_cast<double>(db));
    return grid;
}

std::vector<SweepPoint> snr_sweep(const ModelConfig& base_config,
                                  const std::vector<double>& snr_grid_db, int runs,
                                  std::uint64_t seed, const QuadratureSpec& quad,
                                  const SweepOptions& options) {
    require_valid(base_config);
    if (snr_grid_db.empty()) throw ConfigError("SNR grid is empty");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<SweepPoint> points;
    points.reserve(snr_grid_db.size());

    for (size_t i = 0; i < snr_grid_db.size(); ++i) {
        SweepPoint pt;
        pt.snr_db = snr_grid_db[i];
        const double nu_linear = std::pow(10.0, pt.snr_db / 10.0);
        ModelConfig cfg = base_config;
        cfg.alphas[1] = cfg.alphas[0] * (1.0 + std::sqrt(nu_linear));
        pt.alpha2 = cfg.alphas[1];
        pt.bound_t1 = nan;
        pt.grmse_t1 = nan;
        pt.grmse_t1_stderr = nan;
        pt.bound_lambda.assign(static_cast<size_t>(cfg.K) + 1, nan);
        pt.grmse_lambda.assign(static_cast<size_t>(cfg.K) + 1, nan);

        try {
            const int h_max = options.h_max > 0 ? options.h_max : default_h_max(cfg);
            const SignMode mode =
                options.sign_mode ? *options.sign_mode : default_sign_mode(cfg);
            const TightestBoundResult tb =
                tightest_bound(cfg, h_max, mode, quad, options.sup_tol, options.threads);
            const Eigen::MatrixXd& B = tb.sup.B_star;
            pt.bound_t1 = std::sqrt(std::max(0.0, B(cfg.K + 1, cfg.K + 1)));
            for (int j = 0; j <= cfg.K; ++j)
                pt.bound_lambda[static_cast<size_t>(j)] = std::sqrt(std::max(0.0, B(j, j)));

            const std::uint64_t point_seed = derive_seed(seed, 2, static_cast<std::uint64_t>(i));
            const GmseReport rep = estimate_gmse(cfg, runs, point_seed, options.threads);
            pt.grmse_t1 = rep.grmse_t[0];
            pt.grmse_t1_stderr = rep.grmse_t_stderr[0];
            pt.grmse_lambda = rep.grmse_lambda;
            pt.ok = true;
            pt.status = "ok";
        } catch (const std::exception& err) {
            pt.ok = false;
            pt.status = err.what();
        }
        points.push_back(std::move(pt));
    }
    return points;
}

} // namespace ccwb
