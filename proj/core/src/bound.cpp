#include "ccwb/bound.hpp"

#include "ccwb/errors.hpp"

#include <cmath>
#include <sstream>

namespace ccwb {

namespace {

constexpr double kCondThreshold = 1e12;

KernelParams kernel_params(const ModelConfig& config, int k) {
    KernelParams p;
    p.alpha_k = config.alphas[k - 1];
    p.alpha_k1 = config.alphas[k];
    p.alpha_k2 = (k + 1 <= config.K) ? config.alphas[k + 1] : 0.0;
    p.beta = config.beta;
    p.tau = config.tau;
    return p;
}

// Entry operations accept any nonzero offset; magnitudes at or beyond tau
// fall into the zero branch of u and v. The search-set cap |h| <= tau-1 is
// enforced only on full vectors in assemble_bound.
void check_offset_nonzero(int h, const char* where) {
    if (h == 0) {
        std::ostringstream os;
        os << where << ": offset must be nonzero";
        throw std::domain_error(os.str());
    }
}

void check_offset(int h, const ModelConfig& config, const char* where) {
    if (h == 0 || std::abs(h) > config.tau - 1) {
        std::ostringstream os;
        os << where << ": offset " << h << " outside 1..tau-1 = " << (config.tau - 1);
        throw std::domain_error(os.str());
    }
}

double quad_or_throw(const QuadratureResult& res, const char* what) {
    if (!res.converged) {
        std::ostringstream os;
        os << what << ": quadrature did not converge (err " << res.error_estimate << ")";
        throw QuadratureError(os.str());
    }
    return res.value;
}

} // namespace

double PhiCache::get(int h, double alpha_k, double alpha_k1, double beta,
                     const QuadratureSpec& quad) {
    auto key = std::make_tuple(std::abs(h), alpha_k, alpha_k1, beta);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    KernelParams p;
    p.alpha_k = alpha_k;
    p.alpha_k1 = alpha_k1;
    p.beta = beta;
    double value = big_phi(std::abs(h), p, quad);
    std::lock_guard<std::mutex> lock(mutex_);
    memo_.emplace(key, value);
    return value;
}

double v22_entry(int k, int h_k, const ModelConfig& config, const QuadratureSpec& quad,
                 PhiCache* cache) {
    require_valid(config);
    check_offset_nonzero(h_k, "v22_entry");
    double u = u_fn(config.tau, h_k, k, config.K);
    if (u == 0.0) return 0.0;
    KernelParams p = kernel_params(config, k);
    double phi = cache ? cache->get(h_k, p.alpha_k, p.alpha_k1, p.beta, quad)
                       : big_phi(h_k, p, quad);
    return -static_cast<double>(h_k) * u * phi;
}

double p11_entry(int k, const ModelConfig& config) {
    double a = config.alphas[k - 1];
    if (!(a > 2.0)) throw std::domain_error("p11_entry: requires alpha > 2");
    double b = config.beta;
    // The score's data part contributes E[segment length] / lambda. Segments
    // 1..K have mean step length (tau+1)/2; the last segment runs to the
    // fixed endpoint T, so its mean length is T - K(tau+1)/2 instead. The
    // two coincide in the K=1, tau=T-1 reference setup.
    double mean_len = (k <= config.K) ? (config.tau + 1.0) / 2.0
                                      : config.T - config.K * (config.tau + 1.0) / 2.0;
    return b * mean_len / (a - 1.0) + b * b / (a - 2.0);
}

double p12_entry(int k, int l, int h_l, const ModelConfig& config,
                 const QuadratureSpec& quad) {
    if (l != k && l != k - 1) return 0.0;  // bidiagonal pattern, construction zero
    check_offset_nonzero(h_l, "p12_entry");
    double u = u_fn(config.tau, h_l, l, config.K);
    if (u == 0.0) return 0.0;
    KernelParams p = kernel_params(config, l);
    double log_pref = (p.alpha_k + p.alpha_k1) * std::log(p.beta) - std::lgamma(p.alpha_k) -
                      std::lgamma(p.alpha_k1);
    double pref = std::exp(log_pref);
    // "+" and ratio y1/y2 when l = k-1; "-" and ratio y2/y1 when l = k.
    bool upper = (l == k);
    auto f = [&](double y1, double y2) {
        double ratio = upper ? (y2 / y1) : (y1 / y2);
        return (std::sqrt(ratio) - 1.0) * varphi(y1, y2, h_l, p);
    };
    std::array<GammaAxis, 2> axes{GammaAxis{p.alpha_k, p.beta}, GammaAxis{p.alpha_k1, p.beta}};
    double integral = quad_or_throw(integrate_2d(f, axes, quad), "p12_entry");
    double sign = upper ? -1.0 : 1.0;
    return sign * static_cast<double>(h_l) * u * pref * integral;
}

double p22_diag(int k, int h_k, const ModelConfig& config, const QuadratureSpec& quad,
                PhiCache* cache) {
    check_offset_nonzero(h_k, "p22_diag");
    KernelParams p = kernel_params(config, k);
    double u1 = u_fn(config.tau, h_k, k, config.K);
    double u2 = u_fn(config.tau, 2 * h_k, k, config.K);
    double phi2 = 0.0;
    if (u2 != 0.0) {
        phi2 = cache ? cache->get(2 * h_k, p.alpha_k, p.alpha_k1, p.beta, quad)
                     : big_phi(2 * h_k, p, quad);
    }
    return 2.0 * (u1 - u2 * phi2);
}

double p22_offdiag(int k, int h_k, int h_k1, const ModelConfig& config,
                   const QuadratureSpec& quad) {
    if (k < 1 || k > config.K - 1) throw std::domain_error("p22_offdiag: k must be in 1..K-1");
    check_offset_nonzero(h_k, "p22_offdiag");
    check_offset_nonzero(h_k1, "p22_offdiag");
    KernelParams p = kernel_params(config, k);
    double v = v_fn(config.tau, h_k, h_k1, k, config.K);
    if (v == 0.0) return 0.0;
    double log_pref = (p.alpha_k + p.alpha_k1 + p.alpha_k2) * std::log(p.beta) -
                      std::lgamma(p.alpha_k) - std::lgamma(p.alpha_k1) - std::lgamma(p.alpha_k2);
    double pref = std::exp(log_pref);
    auto f = [&](double z1, double z2, double z3) {
        return phi_tri(z1, z2, z3, h_k, h_k1, p) * w_fn(z1, z2, z3, config.tau, h_k, h_k1);
    };
    std::array<GammaAxis, 3> axes{GammaAxis{p.alpha_k, p.beta}, GammaAxis{p.alpha_k1, p.beta},
                                  GammaAxis{p.alpha_k2, p.beta}};
    double integral = quad_or_throw(integrate_3d(f, axes, quad), "p22_offdiag");
    double sign = ((h_k > 0) == (h_k1 > 0)) ? 1.0 : -1.0;
    return sign * v * pref * integral;
}

BoundMatrices assemble_bound(const OffsetVector& h, const ModelConfig& config,
                             const QuadratureSpec& quad, PhiCache* cache) {
    require_valid(config);
    const int K = config.K;
    if (static_cast<int>(h.h.size()) != K) {
        throw std::domain_error("assemble_bound: offset vector must have K entries");
    }
    for (int hk : h.h) check_offset(hk, config, "assemble_bound");

    const int n = 2 * K + 1;
    BoundMatrices out;
    out.h = h;
    out.V = Eigen::MatrixXd::Zero(n, n);
    out.P = Eigen::MatrixXd::Zero(n, n);

    for (int k = 1; k <= K + 1; ++k) {
        out.V(k - 1, k - 1) = -1.0;
        out.P(k - 1, k - 1) = p11_entry(k, config);
    }
    for (int k = 1; k <= K; ++k) {
        out.V(K + k, K + k) = v22_entry(k, h.h[k - 1], config, quad, cache);
    }
    for (int l = 1; l <= K; ++l) {
        double a_ll = p12_entry(l, l, h.h[l - 1], config, quad);
        double a_l1l = p12_entry(l + 1, l, h.h[l - 1], config, quad);
        out.P(l - 1, K + l) = a_ll;
        out.P(K + l, l - 1) = a_ll;
        out.P(l, K + l) = a_l1l;
        out.P(K + l, l) = a_l1l;
    }
    for (int k = 1; k <= K; ++k) {
        out.P(K + k, K + k) = p22_diag(k, h.h[k - 1], config, quad, cache);
    }
    for (int k = 1; k <= K - 1; ++k) {
        double c = p22_offdiag(k, h.h[k - 1], h.h[k], config, quad);
        out.P(K + k, K + k + 1) = c;
        out.P(K + k + 1, K + k) = c;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.P);
    if (es.info() != Eigen::Success) throw SingularPError("assemble_bound: eigensolve failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    double emin = ev.minCoeff();
    double emax_abs = ev.cwiseAbs().maxCoeff();
    if (!(emin > 0.0) || !std::isfinite(emax_abs)) {
        throw SingularPError("assemble_bound: P is not positive definite for this offset");
    }
    out.condition_P = emax_abs / emin;
    if (out.condition_P > kCondThreshold) {
        std::ostringstream os;
        os << "assemble_bound: cond(P) = " << out.condition_P << " exceeds " << kCondThreshold;
        throw SingularPError(os.str());
    }

    Eigen::MatrixXd pinv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                           es.eigenvectors().transpose();
    Eigen::MatrixXd r = out.V * pinv * out.V.transpose();
    out.R = 0.5 * (r + r.transpose());
    return out;
}

} // namespace ccwb
