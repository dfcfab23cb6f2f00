#include "ccwb/estimator.hpp"

#include "ccwb/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace ccwb {
namespace {

void require_counts(const ModelConfig& config, const Dataset& data) {
    if (static_cast<int>(data.counts.size()) != config.T)
        throw ConfigError("dataset has " + std::to_string(data.counts.size()) +
                          " samples, config expects " + std::to_string(config.T));
}

} // namespace

std::vector<double> map_lambda(const ModelConfig& config, const Dataset& data,
                               const std::vector<int>& locations) {
    require_valid(config);
    require_counts(config, data);
    if (!in_location_support(locations, config))
        throw InvalidSegmentationError("changepoint locations lie outside the prior support");

    std::vector<double> lambdas(static_cast<size_t>(config.K) + 1);
    int prev = 0;
    for (int k = 0; k <= config.K; ++k) {
        const int next = k < config.K ? locations[static_cast<size_t>(k)] : config.T;
        double sum = 0.0;
        for (int t = prev; t < next; ++t) sum += static_cast<double>(data.counts[static_cast<size_t>(t)]);
        const double n = static_cast<double>(next - prev);
        lambdas[static_cast<size_t>(k)] =
            (config.alphas[static_cast<size_t>(k)] + sum - 1.0) / (config.beta + n);
        prev = next;
    }
    return lambdas;
}

MapEstimate map_changepoints(const ModelConfig& config, const Dataset& data) {
    require_valid(config);
    require_counts(config, data);

    const double total = std::pow(static_cast<double>(config.tau), config.K);
    if (total > 1e8)
        throw ConfigError("exhaustive scan needs tau^K <= 1e8; reduce tau or K (tau^K = " +
                          std::to_string(total) + ")");

    const int T = config.T;
    const int K = config.K;

    // Prefix sums over counts and log-factorials make each candidate O(K).
    std::vector<double> cum_counts(static_cast<size_t>(T) + 1, 0.0);
    std::vector<double> cum_logfact(static_cast<size_t>(T) + 1, 0.0);
    for (int t = 0; t < T; ++t) {
        const double kappa = static_cast<double>(data.counts[static_cast<size_t>(t)]);
        cum_counts[static_cast<size_t>(t) + 1] = cum_counts[static_cast<size_t>(t)] + kappa;
        cum_logfact[static_cast<size_t>(t) + 1] =
            cum_logfact[static_cast<size_t>(t)] + boost::math::lgamma(kappa + 1.0);
    }

    std::vector<double> gamma_const(static_cast<size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) {
        const double a = config.alphas[static_cast<size_t>(k)];
        gamma_const[static_cast<size_t>(k)] =
            a * std::log(config.beta) - boost::math::lgamma(a);
    }
    const double location_prior = -static_cast<double>(K) * std::log(static_cast<double>(config.tau));

    // Profile objective for segment k on (a, b]: rates maximized in closed form.
    auto segment_score = [&](int k, int a, int b) {
        const double sum = cum_counts[static_cast<size_t>(b)] - cum_counts[static_cast<size_t>(a)];
        const double lfact =
            cum_logfact[static_cast<size_t>(b)] - cum_logfact[static_cast<size_t>(a)];
        const double n = static_cast<double>(b - a);
        const double alpha = config.alphas[static_cast<size_t>(k)];
        const double lam = (alpha + sum - 1.0) / (config.beta + n);
        return (alpha - 1.0 + sum) * std::log(lam) - (n + config.beta) * lam +
               gamma_const[static_cast<size_t>(k)] - lfact;
    };

    std::vector<int> steps(static_cast<size_t>(K), 1);
    std::vector<int> best_locations;
    double best_score = -std::numeric_limits<double>::infinity();
    std::uint64_t evaluated = 0;

    std::vector<int> locations(static_cast<size_t>(K));
    for (;;) {
        ++evaluated;
        int prev = 0;
        double score = location_prior;
        for (int k = 0; k < K; ++k) {
            const int next = prev + steps[static_cast<size_t>(k)];
            locations[static_cast<size_t>(k)] = next;
            score += segment_score(k, prev, next);
            prev = next;
        }
        score += segment_score(K, prev, T);
        if (score > best_score) {
            best_score = score;
            best_locations = locations;
        }

        int pos = K - 1;
        while (pos >= 0 && ++steps[static_cast<size_t>(pos)] > config.tau)
            steps[static_cast<size_t>(pos--)] = 1;
        if (pos < 0) break;
    }

    MapEstimate out;
    out.locations = best_locations;
    out.lambdas = map_lambda(config, data, best_locations);
    out.candidates_evaluated = evaluated;

    ParameterDraw draw;
    draw.lambdas = out.lambdas;
    draw.locations = out.locations;
    out.log_posterior = log_joint(data, draw, config);
    return out;
}

} // namespace ccwb
