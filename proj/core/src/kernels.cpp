#include "ccwb/kernels.hpp"

#include "ccwb/errors.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace ccwb {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        std::ostringstream os;
        os << name << " must be positive, got " << v;
        throw std::domain_error(os.str());
    }
}

// Threshold below which the (1-r^{1-m})/(1-r) term switches to its series
// around the removable singularity at r = 1.
constexpr double kREps = 1e-8;

} // namespace

double rho(double la, double lb) {
    require_positive(la, "rho: la");
    require_positive(lb, "rho: lb");
    double d = std::sqrt(lb) - std::sqrt(la);
    return std::exp(-0.5 * d * d);
}

double varphi(double y1, double y2, int h, const KernelParams& p) {
    require_positive(y1, "varphi: y1");
    require_positive(y2, "varphi: y2");
    double d = std::sqrt(y2) - std::sqrt(y1);
    double log_v = (p.alpha_k - 1.0) * std::log(y1) + (p.alpha_k1 - 1.0) * std::log(y2) -
                   p.beta * (y1 + y2) - std::abs(h) * 0.5 * d * d;
    return std::exp(log_v);
}

double big_phi(int h, const KernelParams& p, const QuadratureSpec& quad) {
    double log_pref = (p.alpha_k + p.alpha_k1) * std::log(p.beta) - std::lgamma(p.alpha_k) -
                      std::lgamma(p.alpha_k1);
    double pref = std::exp(log_pref);
    auto f = [&](double y1, double y2) { return pref * varphi(y1, y2, h, p); };
    std::array<GammaAxis, 2> axes{GammaAxis{p.alpha_k, p.beta}, GammaAxis{p.alpha_k1, p.beta}};
    QuadratureResult res = integrate_2d(f, axes, quad);
    if (!res.converged) {
        std::ostringstream os;
        os << "big_phi(" << h << "): quadrature did not converge (err "
           << res.error_estimate << " after " << res.evaluations << " evaluations)";
        throw QuadratureError(os.str());
    }
    return res.value;
}

double phi_tri(double z1, double z2, double z3, int hk, int hk1, const KernelParams& p) {
    require_positive(z1, "phi_tri: z1");
    require_positive(z2, "phi_tri: z2");
    require_positive(z3, "phi_tri: z3");
    double d12 = std::sqrt(z2) - std::sqrt(z1);
    double d23 = std::sqrt(z3) - std::sqrt(z2);
    double log_v = (p.alpha_k - 1.0) * std::log(z1) + (p.alpha_k1 - 1.0) * std::log(z2) +
                   (p.alpha_k2 - 1.0) * std::log(z3) - p.beta * (z1 + z2 + z3) -
                   std::abs(hk) * 0.5 * d12 * d12 - std::abs(hk1) * 0.5 * d23 * d23;
    return std::exp(log_v);
}

double u_fn(int tau, int h, int k, int K) {
    int ah = std::abs(h);
    if (ah > tau) return 0.0;
    double t = static_cast<double>(tau);
    double num = t - static_cast<double>(ah);
    if (k <= K - 1) return num * num / (t * t);
    return num / t;  // k = K
}

double v_fn(int tau, int hk, int hk1, int k, int K) {
    if (k < 1 || k > K - 1) throw std::domain_error("v_fn: pair index k must satisfy 1 <= k <= K-1");
    int ak = std::abs(hk), ak1 = std::abs(hk1);
    if (std::max(ak, ak1) > tau) return 0.0;
    double t = static_cast<double>(tau);
    if (k <= K - 2) return (t - ak) * (t - ak1) / (t * t * t);
    return (t - ak) / (t * t);  // k = K-1: no step constraint after the last changepoint
}

double r_fn(double z1, double z2, double z3) {
    require_positive(z1, "r_fn: z1");
    require_positive(z2, "r_fn: z2");
    require_positive(z3, "r_fn: z3");
    return std::exp(-z2 + std::sqrt(z1 * z2) + std::sqrt(z2 * z3) - std::sqrt(z1 * z3));
}

double w_fn(double z1, double z2, double z3, int tau, int hk, int hk1) {
    int ak = std::abs(hk), ak1 = std::abs(hk1);
    double t = static_cast<double>(tau);
    double w = 2.0 * std::max(t - ak - ak1, 0.0) - std::max(t - std::max(ak, ak1), 0.0) -
               std::max(t - ak - ak1 + 1.0, 0.0);
    int m = std::min(ak, ak1);
    if (m == 0) {
        w += 1.0;  // (1-r^1)/(1-r); offsets are nonzero in practice but keep the formula literal
    } else if (m > 1) {
        double r = r_fn(z1, z2, z3);
        if (std::abs(1.0 - r) < kREps) {
            // (1-r^{1-m})/(1-r) = -(r^{-1}+...+r^{1-m}), value 1-m at r=1
            // with slope m(m-1)/2
            double dm = static_cast<double>(m);
            w += (1.0 - dm) + dm * (dm - 1.0) * 0.5 * (r - 1.0);
        } else {
            w += (1.0 - std::pow(r, 1.0 - static_cast<double>(m))) / (1.0 - r);
        }
    }
    // m == 1 gives r^0: the geometric term is exactly zero (no-overlap case).
    return w;
}

} // namespace ccwb
