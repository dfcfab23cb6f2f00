#pragma once

#include "ccwb/model.hpp"

#include <cstdint>
#include <vector>

namespace ccwb {

struct MapEstimate {
    std::vector<double> lambdas;
    std::vector<int> locations;
    double log_posterior = 0.0;
    std::uint64_t candidates_evaluated = 0;
};

/// Posterior-mode rates for a fixed segmentation:
/// lambda_k = (alpha_k + sum of counts in segment k - 1) / (beta + segment length).
/// Throws InvalidSegmentationError when the locations fall outside the prior
/// support for the given config.
std::vector<double> map_lambda(const ModelConfig& config, const Dataset& data,
                               const std::vector<int>& locations);

/// Joint MAP estimate via exhaustive scan of all tau^K admissible
/// segmentations, rates profiled out in closed form per candidate. Candidates
/// are visited in lexicographic step order and ties keep the earliest, so the
/// result is deterministic. Refuses configs with tau^K above 1e8.
MapEstimate map_changepoints(const ModelConfig& config, const Dataset& data);

} // namespace ccwb
