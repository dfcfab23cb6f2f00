#pragma once

#include "ccwb/quadrature.hpp"

#include <vector>

namespace ccwb {

/// Shapes, rate and step bound entering the kernel functions. alpha_k2 is
/// only read by the trivariate kernel.
struct KernelParams {
    double alpha_k = 0.0;
    double alpha_k1 = 0.0;
    double alpha_k2 = 0.0;
    double beta = 1.0;
    int tau = 1;
};

/// Weiss-Weinstein test point offsets h_1..h_K, one per changepoint.
/// Valid offsets are nonzero with |h_k| <= tau-1; offsets at or beyond tau
/// force u = 0 and a singular bound, so they are excluded from search sets.
struct OffsetVector {
    std::vector<int> h;
};

/// rho(la, lb) = exp{-(sqrt(lb)-sqrt(la))^2/2}, the per-sample Poisson
/// Hellinger affinity between rates la and lb.
double rho(double la, double lb);

/// Bivariate kernel: y1^{a_k-1} y2^{a_k1-1} exp{-beta(y1+y2) - |h| (sqrt(y2)-sqrt(y1))^2/2}.
double varphi(double y1, double y2, int h, const KernelParams& p);

/// Phi(h) = beta^{a_k+a_k1}/(Gamma(a_k)Gamma(a_k1)) * double integral of
/// varphi. Lies in (0,1], Phi(0)=1, even in h. Throws QuadratureError if the
/// integral does not converge.
double big_phi(int h, const KernelParams& p, const QuadratureSpec& quad);

/// Trivariate kernel with consecutive offsets hk, hk1 coupling (z1,z2) and (z2,z3).
double phi_tri(double z1, double z2, double z3, int hk, int hk1, const KernelParams& p);

/// u(tau, h) for changepoint index k of K: (tau-|h|)^2/tau^2 for k <= K-1,
/// (tau-|h|)/tau for k = K, 0 beyond tau.
double u_fn(int tau, int h, int k, int K);

/// v(tau, hk, hk1) for the consecutive pair starting at k (1 <= k <= K-1):
/// (tau-|hk|)(tau-|hk1|)/tau^3 for k <= K-2 and (tau-|hk|)/tau^2 for k = K-1.
/// The second branch has no (tau-|hk1|) factor because no step constraint
/// follows the last changepoint; the cardinality oracle pins this reading.
/// Returns 0 when max(|hk|,|hk1|) > tau.
double v_fn(int tau, int hk, int hk1, int k, int K);

/// r(z) = exp{-z2 + sqrt(z1 z2) + sqrt(z2 z3) - sqrt(z1 z3)}.
double r_fn(double z1, double z2, double z3);

/// w(z, tau, hk, hk1) = 2 max(tau-|hk|-|hk1|, 0) - max(tau-max(|hk|,|hk1|), 0)
///                      - max(tau-|hk|-|hk1|+1, 0) + (1 - r^{1-min(|hk|,|hk1|)})/(1-r).
/// The geometric term is the overlap-case series; near r=1 it is evaluated by
/// its limit 1-min plus a first-order correction (removable singularity).
double w_fn(double z1, double z2, double z3, int tau, int hk, int hk1);

} // namespace ccwb
