#include "ccwb/model.hpp"

#include "ccwb/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ccwb {

int tau_max(int T, int K) {
    if (K < 1) throw ConfigError("tau_max: K must be >= 1");
    return (T - 1) / K;
}

std::vector<std::string> validate_config(const ModelConfig& config) {
    std::vector<std::string> violations;
    if (config.K < 1) violations.push_back("K must be >= 1");
    if (config.T <= config.K) violations.push_back("T must exceed K");
    if (config.tau < 1) violations.push_back("tau must be >= 1");
    if (config.K >= 1 && config.T > config.K && config.tau > tau_max(config.T, config.K)) {
        std::ostringstream os;
        os << "tau exceeds tau_max = " << tau_max(config.T, config.K);
        violations.push_back(os.str());
    }
    if (static_cast<int>(config.alphas.size()) != config.K + 1) {
        violations.push_back("alphas must have K+1 entries");
    }
    for (std::size_t i = 0; i < config.alphas.size(); ++i) {
        if (!(config.alphas[i] > 2.0)) {
            std::ostringstream os;
            os << "alpha must exceed 2 (alpha_" << (i + 1) << " = " << config.alphas[i] << ")";
            violations.push_back(os.str());
        }
    }
    if (!(config.beta > 0.0)) violations.push_back("beta must be positive");
    return violations;
}

void require_valid(const ModelConfig& config) {
    auto violations = validate_config(config);
    if (violations.empty()) return;
    std::ostringstream os;
    os << "invalid model config:";
    for (const auto& v : violations) os << " [" << v << "]";
    throw ConfigError(os.str());
}

bool in_location_support(const std::vector<int>& locations, const ModelConfig& config) {
    if (static_cast<int>(locations.size()) != config.K) return false;
    int prev = 0;
    for (int t : locations) {
        int step = t - prev;
        if (step < 1 || step > config.tau) return false;
        prev = t;
    }
    return true;
}

ParameterDraw sample_prior(const ModelConfig& config, std::mt19937_64& rng) {
    ParameterDraw draw;
    draw.lambdas.reserve(config.K + 1);
    for (int k = 0; k <= config.K; ++k) {
        // Gamma(shape alpha, rate beta) = std::gamma_distribution(alpha, 1/beta).
        std::gamma_distribution<double> gamma(config.alphas[k], 1.0 / config.beta);
        draw.lambdas.push_back(gamma(rng));
    }
    draw.locations.reserve(config.K);
    std::uniform_int_distribution<int> step(1, config.tau);
    int prev = 0;
    for (int k = 0; k < config.K; ++k) {
        prev += step(rng);
        draw.locations.push_back(prev);
    }
    return draw;
}

Dataset sample_observations(const ParameterDraw& params, const ModelConfig& config,
                            std::mt19937_64& rng, std::uint64_t provenance) {
    Dataset data;
    data.seed = provenance;
    data.counts.reserve(config.T);
    int segment = 0;
    for (int t = 1; t <= config.T; ++t) {
        while (segment < config.K && t > params.locations[segment]) ++segment;
        std::poisson_distribution<long long> pois(params.lambdas[segment]);
        data.counts.push_back(pois(rng));
    }
    return data;
}

double log_joint(const Dataset& dataset, const ParameterDraw& params,
                 const ModelConfig& config) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (!in_location_support(params.locations, config)) return neg_inf;
    if (static_cast<int>(dataset.counts.size()) != config.T) {
        throw ConfigError("log_joint: dataset length does not match T");
    }
    for (double lam : params.lambdas) {
        if (!(lam > 0.0)) return neg_inf;
    }

    double lp = 0.0;
    // Likelihood over segments (t_0 = 0, t_{K+1} = T).
    int segment = 0;
    for (int t = 1; t <= config.T; ++t) {
        while (segment < config.K && t > params.locations[segment]) ++segment;
        double lam = params.lambdas[segment];
        long long kappa = dataset.counts[t - 1];
        lp += -lam + static_cast<double>(kappa) * std::log(lam) -
              std::lgamma(static_cast<double>(kappa) + 1.0);
    }
    // Gamma priors on the rates.
    for (int k = 0; k <= config.K; ++k) {
        double a = config.alphas[k];
        double lam = params.lambdas[k];
        lp += a * std::log(config.beta) - std::lgamma(a) + (a - 1.0) * std::log(lam) -
              config.beta * lam;
    }
    // Uniform random walk prior on the locations.
    lp -= config.K * std::log(static_cast<double>(config.tau));
    return lp;
}

} // namespace ccwb
