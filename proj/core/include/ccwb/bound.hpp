#pragma once

#include "ccwb/kernels.hpp"
#include "ccwb/model.hpp"
#include "ccwb/quadrature.hpp"

#include <Eigen/Dense>

#include <map>
#include <mutex>
#include <tuple>

namespace ccwb {

/// Assembled bound matrices for one offset vector. Row/column order is
/// (lambda_1..lambda_{K+1}, t_1..t_K), so V and P are (2K+1)x(2K+1) and
/// R = V P^{-1} V^T is the matrix lower bound on the global MSE.
struct BoundMatrices {
    Eigen::MatrixXd V;
    Eigen::MatrixXd P;
    Eigen::MatrixXd R;
    OffsetVector h;
    double condition_P = 0.0;
};

/// Memo for Phi values keyed by (|h|, alpha_k, alpha_k1, beta); Phi depends
/// on nothing else, so shared reuse across entries and offsets is safe.
class PhiCache {
public:
    double get(int h, double alpha_k, double alpha_k1, double beta, const QuadratureSpec& quad);

private:
    std::map<std::tuple<int, double, double, double>, double> memo_;
    std::mutex mutex_;
};

/// [V22]_{k,k} = -h_k u(tau,h_k) Phi(h_k), shapes (alpha_k, alpha_{k+1}).
/// k is 1-based in 1..K.
double v22_entry(int k, int h_k, const ModelConfig& config, const QuadratureSpec& quad,
                 PhiCache* cache = nullptr);

/// [P11]_{k,k} = beta E[n_k]/(alpha_k-1) + beta^2/(alpha_k-2) with E[n_k] the
/// mean segment length: (tau+1)/2 for k <= K and T - K(tau+1)/2 for the last
/// segment, whose right endpoint is fixed at T. Off-diagonal P11 entries are
/// exactly zero. Requires alpha_k > 2. k in 1..K+1.
double p11_entry(int k, const ModelConfig& config);

/// [P12]_{k,l} for row k in 1..K+1, column l in 1..K. Exact zero unless
/// l is k-1 or k. The nonzero entries are
///   [P12]_{l,l}   = -h_l u(tau,h_l) c_l Int (sqrt(y2/y1) - 1) varphi_{h_l} dy
///   [P12]_{l+1,l} = +h_l u(tau,h_l) c_l Int (sqrt(y1/y2) - 1) varphi_{h_l} dy
/// with c_l the gamma normalizing prefactor over shapes (alpha_l, alpha_{l+1}).
double p12_entry(int k, int l, int h_l, const ModelConfig& config, const QuadratureSpec& quad);

/// B_k = 2(u(tau,h_k) - u(tau,2h_k) Phi(2h_k)), k in 1..K.
double p22_diag(int k, int h_k, const ModelConfig& config, const QuadratureSpec& quad,
                PhiCache* cache = nullptr);

/// C_k = sign(h_k h_{k+1}) v(tau,h_k,h_{k+1}) c_k Int phi_tri w dz for the
/// consecutive pair (k, k+1), k in 1..K-1. The closed form is stated for
/// positive offsets; the sign factor carries the odd dependence of the
/// four-term square-root-density combination on each offset's sign.
double p22_offdiag(int k, int h_k, int h_k1, const ModelConfig& config,
                   const QuadratureSpec& quad);

/// Builds V, P and R = V P^{-1} V^T. Throws SingularPError when P is not
/// numerically positive definite or its condition estimate exceeds 1e12,
/// signalling that this offset vector must be dropped from the search set.
BoundMatrices assemble_bound(const OffsetVector& h, const ModelConfig& config,
                             const QuadratureSpec& quad, PhiCache* cache = nullptr);

} // namespace ccwb
