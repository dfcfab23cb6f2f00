#pragma once

#include "ccwb/bound.hpp"
#include "ccwb/kernels.hpp"
#include "ccwb/model.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace ccwb {

enum class SignMode { positive, all_signs };

/// The finite family of per-offset bound matrices entering the supremum.
struct EllipsoidSet {
    std::vector<std::pair<OffsetVector, Eigen::MatrixXd>> members;
    int dim = 0;  // 2K+1
};

/// Result of the covering-ellipsoid solve.
///
/// Geometric convention fixed here: an ellipsoid with matrix A is
/// e(A) = {x : x^T A x <= 1}, so e(B) covers e(R_n) exactly when B <= R_n in
/// the Loewner order, and the minimum volume covering ellipsoid maximizes
/// log det(B) under those constraints. (The source inequality language mixes
/// this with the inverse-matrix convention; the analytic test cases pin this
/// one.) B* remains a valid lower bound: B* <= R(h) <= GMSE in quadratic forms.
struct SupremumResult {
    Eigen::MatrixXd B_star;
    double kkt_gap = 0.0;                 ///< barrier suboptimality bound on log det
    std::vector<int> active_members;      ///< members whose constraint is tight
    int iterations = 0;                   ///< total Newton iterations
    std::vector<int> dropped_members;     ///< PSD-singular members skipped with a warning
};

/// All offset vectors with entries in {1..h_max} (positive mode) or
/// {-h_max..-1, 1..h_max} (all-signs mode), lexicographic order.
std::vector<OffsetVector> enumerate_offsets(const ModelConfig& config, int h_max,
                                            SignMode sign_mode);

/// Maximizes log det(B) subject to 0 <= B <= R_n for every member, via a
/// log-det barrier with exact Newton steps on the symmetric-matrix space.
/// Containment holds within tol: min-eig(R_n - B*) >= -tol*||R_n||.
SupremumResult mvee_sup(const EllipsoidSet& ells, double tol);

/// Per-member minimum eigenvalue of R_n - B; nonnegative values mean e(B)
/// covers e(R_n).
std::vector<double> check_coverage(const Eigen::MatrixXd& B, const EllipsoidSet& ells);

struct TightestBoundResult {
    SupremumResult sup;
    std::vector<BoundMatrices> per_h;        ///< members that entered the solve
    std::vector<OffsetVector> dropped_h;     ///< offsets dropped for singular P
};

/// Pipelines enumerate_offsets -> assemble_bound (dropping SingularP
/// offsets) -> mvee_sup. Throws EmptySearchSetError when nothing survives.
TightestBoundResult tightest_bound(const ModelConfig& config, int h_max, SignMode sign_mode,
                                   const QuadratureSpec& quad, double tol, int threads = 1);

/// Default search radius: tau-1 capped at 12 for K=1 and at 4 for K>=2.
int default_h_max(const ModelConfig& config);

/// Default sign mode: all-signs for K=1, positive for K>=2.
SignMode default_sign_mode(const ModelConfig& config);

} // namespace ccwb
