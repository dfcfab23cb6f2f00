#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ccwb {

/// Hyperparameters of the Poisson changepoint model.
///
/// The count series x_1..x_T is piecewise Poisson: x_t ~ Poisson(lambda_k)
/// for t in segment k, segments delimited by changepoints t_1 < ... < t_K.
/// Rates carry independent Gamma(alpha_k, beta) priors (rate
/// parameterization) and the changepoint vector follows a random walk with
/// uniform steps on {1..tau}.
struct ModelConfig {
    int T = 0;                   ///< number of samples
    int K = 0;                   ///< number of changepoints
    int tau = 0;                 ///< random walk step bound
    std::vector<double> alphas;  ///< K+1 gamma shapes
    double beta = 1.0;           ///< gamma rate, shared
};

/// Largest admissible tau: floor((T-1)/K).
int tau_max(int T, int K);

/// Returns every violated invariant as a message; empty means valid.
/// Checked invariants: 1 <= K < T, 1 <= tau <= tau_max, alphas has K+1
/// entries each > 2 (P11 requires alpha > 2), beta > 0.
std::vector<std::string> validate_config(const ModelConfig& config);

/// Throws ConfigError listing all violations if the config is invalid.
void require_valid(const ModelConfig& config);

/// One realization of the unknowns (rates and changepoint locations).
struct ParameterDraw {
    std::vector<double> lambdas;  ///< K+1 positive rates
    std::vector<int> locations;   ///< K strictly increasing changepoints
};

/// One simulated count series.
struct Dataset {
    std::vector<long long> counts;  ///< length T
    std::uint64_t seed = 0;         ///< RNG provenance tag
};

/// True when locations lie in the random walk support: with t_0 = 0 every
/// step t_k - t_{k-1} is in {1..tau}.
bool in_location_support(const std::vector<int>& locations, const ModelConfig& config);

/// Draws lambda_k ~ Gamma(alpha_k, beta) i.i.d. and t_k = t_{k-1} + eps_k
/// with eps_k uniform on {1..tau}.
ParameterDraw sample_prior(const ModelConfig& config, std::mt19937_64& rng);

/// Draws x_t ~ Poisson(lambda at t) independently across t. `provenance` is
/// stored in the returned Dataset untouched.
Dataset sample_observations(const ParameterDraw& params, const ModelConfig& config,
                            std::mt19937_64& rng, std::uint64_t provenance = 0);

/// Log of the joint density f(x, lambda, t): Poisson log likelihood plus
/// gamma log priors plus the location prior -K log tau. Returns -infinity
/// when the locations leave the prior support or any lambda is nonpositive.
double log_joint(const Dataset& dataset, const ParameterDraw& params,
                 const ModelConfig& config);

} // namespace ccwb
