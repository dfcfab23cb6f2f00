#pragma once

#include "ccwb/kernels.hpp"
#include "ccwb/model.hpp"
#include "ccwb/quadrature.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace ccwb {

/// Controls for the brute-force count sums: every per-sample Poisson sum is
/// truncated at kappa_max, sized so the tail mass at the largest plausible
/// rate stays below tol.
struct TruncationSpec {
    int kappa_max = 0;
    double tol = 1e-9;
    double lambda_hi = 0.0;  ///< the rate at which kappa_max was sized
    QuadratureSpec quad;     ///< controls for the rate integrals
};

/// kappa_max = ceiling of the 1-1e-12 Poisson quantile at the 1-1e-6 gamma
/// quantile over all shapes. Throws TruncationInsufficientError when the
/// resulting tail mass still exceeds tol.
TruncationSpec make_truncation(const ModelConfig& config, const QuadratureSpec& quad,
                               double tol = 1e-9);

/// Direct evaluation of zeta(h_k, h'_l): sum over admissible segmentations of
/// the integrated square-root density product, with the count sums enumerated
/// numerically instead of using the affinity closed form. Only feasible on
/// tiny instances; at most 3 rate components may be involved.
double zeta_bruteforce(int hk, int hl, int k, int l, const ModelConfig& config,
                       const TruncationSpec& trunc);

/// Index-pair pattern of a second-order term: UT strictly above the first
/// superdiagonal (l > k+1), FSD on it (l = k+1), D on the diagonal (l = k).
enum class CardCase { UT, FSD, D };

struct Rational {
    long long num = 0;
    long long den = 1;
};

inline bool operator==(const Rational& a, const Rational& b) {
    return a.num * b.den == b.num * a.den;
}

/// Exact Card(J)/tau^K by integer enumeration of the support. The case tag
/// must match the (k, l) pattern.
Rational cardinality_ratio(CardCase c, int tau, int hk, int hl, int k, int l, int K);

/// Members of J = {l in S : l + hk e_k in S, l + hl e_l in S} as step
/// vectors, lexicographic order.
std::vector<std::vector<int>> enumerate_members(int tau, int hk, int hl, int k, int l, int K);

/// Closed-form per-step admissible ranges [lo_i, hi_i] describing J as a box
/// in step space; empty box entries have lo > hi. These reproduce the
/// tabulated lowest/greatest element formulas for all three cases.
std::vector<std::pair<int, int>> table_step_bounds(int tau, int hk, int hl, int k, int l,
                                                   int K);

/// Monte Carlo estimates of the full V and P matrices from pointwise test
/// function evaluations, with per-entry standard errors of the mean.
struct BlockMcResult {
    Eigen::MatrixXd V;
    Eigen::MatrixXd P;
    Eigen::MatrixXd V_stderr;
    Eigen::MatrixXd P_stderr;
    int runs = 0;
    std::uint64_t seed = 0;
};

BlockMcResult block_mc(const ModelConfig& config, const OffsetVector& h, int runs,
                       std::uint64_t seed, int threads = 1);

} // namespace ccwb
