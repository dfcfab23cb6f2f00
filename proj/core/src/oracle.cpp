#include "ccwb/oracle.hpp"

#include "ccwb/errors.hpp"
#include "ccwb/parallel.hpp"
#include "ccwb/rng.hpp"

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <string>

namespace ccwb {
namespace {

long long ipow(long long base, int exp) {
    long long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

bool valid_steps(const std::vector<int>& locations, int tau) {
    int prev = 0;
    for (int t : locations) {
        const int step = t - prev;
        if (step < 1 || step > tau) return false;
        prev = t;
    }
    return true;
}

// Visits every step vector in {1..tau}^K lexicographically; fn receives the
// cumulative location vector.
template <typename Fn>
void for_each_support_point(int tau, int K, Fn&& fn) {
    std::vector<int> steps(static_cast<size_t>(K), 1);
    std::vector<int> locations(static_cast<size_t>(K));
    for (;;) {
        int acc = 0;
        for (int i = 0; i < K; ++i) {
            acc += steps[static_cast<size_t>(i)];
            locations[static_cast<size_t>(i)] = acc;
        }
        fn(steps, locations);
        int pos = K - 1;
        while (pos >= 0 && ++steps[static_cast<size_t>(pos)] > tau)
            steps[static_cast<size_t>(pos--)] = 1;
        if (pos < 0) break;
    }
}

bool member_of_J(const std::vector<int>& locations, int tau, int hk, int hl, int k, int l) {
    std::vector<int> a = locations;
    a[static_cast<size_t>(k) - 1] += hk;
    if (!valid_steps(a, tau)) return false;
    std::vector<int> b = locations;
    b[static_cast<size_t>(l) - 1] += hl;
    return valid_steps(b, tau);
}

// Segment id (1-based) of sample t under the given changepoint locations.
int segment_of(int t, const std::vector<int>& locations) {
    int seg = 1;
    for (int loc : locations)
        if (loc < t) ++seg;
    return seg;
}

// Truncated sum over counts of sqrt(Pois(kappa; la) Pois(kappa; lb)). The
// terms reduce to exp(-(la+lb)/2) g^kappa / kappa! with g = sqrt(la lb),
// summed numerically rather than through the affinity closed form.
double sqrt_poisson_affinity(double la, double lb, int kappa_max) {
    const double g = std::sqrt(la * lb);
    double term = std::exp(-0.5 * (la + lb));
    double sum = term;
    for (int kappa = 1; kappa <= kappa_max; ++kappa) {
        term *= g / static_cast<double>(kappa);
        sum += term;
    }
    return sum;
}

struct PairKey {
    // flattened (segment i, segment j, multiplicity) triples, i < j, sorted
    std::vector<int> flat;
    bool operator<(const PairKey& other) const { return flat < other.flat; }
};

} // namespace

TruncationSpec make_truncation(const ModelConfig& config, const QuadratureSpec& quad,
                               double tol) {
    require_valid(config);
    TruncationSpec spec;
    spec.tol = tol;
    spec.quad = quad;
    for (double alpha : config.alphas)
        spec.lambda_hi = std::max(spec.lambda_hi, gamma_quantile(alpha, config.beta, 1.0 - 1e-6));

    const boost::math::poisson_distribution<double> pois(spec.lambda_hi);
    spec.kappa_max = static_cast<int>(std::ceil(boost::math::quantile(pois, 1.0 - 1e-12)));

    const double tail =
        boost::math::cdf(boost::math::complement(pois, static_cast<double>(spec.kappa_max)));
    if (tail > tol)
        throw TruncationInsufficientError(
            "Poisson tail mass " + std::to_string(tail) + " at rate " +
            std::to_string(spec.lambda_hi) + " exceeds tolerance " + std::to_string(tol));
    return spec;
}

double zeta_bruteforce(int hk, int hl, int k, int l, const ModelConfig& config,
                       const TruncationSpec& trunc) {
    require_valid(config);
    if (k < 1 || k > config.K || l < 1 || l > config.K)
        throw ConfigError("zeta indices must lie in 1..K");

    // Group support points by their mismatch pattern; members of a class
    // share the same rate integral.
    std::map<PairKey, long long> classes;
    for_each_support_point(config.tau, config.K, [&](const std::vector<int>&,
                                                     const std::vector<int>& locations) {
        if (!member_of_J(locations, config.tau, hk, hl, k, l)) return;
        std::vector<int> a = locations;
        a[static_cast<size_t>(k) - 1] += hk;
        std::vector<int> b = locations;
        b[static_cast<size_t>(l) - 1] += hl;

        std::map<std::pair<int, int>, int> pairs;
        for (int t = 1; t <= config.T; ++t) {
            const int sa = segment_of(t, a);
            const int sb = segment_of(t, b);
            if (sa != sb) ++pairs[{std::min(sa, sb), std::max(sa, sb)}];
        }
        PairKey key;
        for (const auto& [pr, mult] : pairs) {
            key.flat.push_back(pr.first);
            key.flat.push_back(pr.second);
            key.flat.push_back(mult);
        }
        ++classes[key];
    });

    double acc = 0.0;
    for (const auto& [key, count] : classes) {
        std::vector<int> comps;
        const int npairs = static_cast<int>(key.flat.size()) / 3;
        for (int p = 0; p < npairs; ++p) {
            comps.push_back(key.flat[static_cast<size_t>(3 * p)]);
            comps.push_back(key.flat[static_cast<size_t>(3 * p) + 1]);
        }
        std::sort(comps.begin(), comps.end());
        comps.erase(std::unique(comps.begin(), comps.end()), comps.end());

        double value = 1.0;
        if (!comps.empty()) {
            const int dims = static_cast<int>(comps.size());
            if (dims != 2 && dims != 3)
                throw ConfigError("zeta_bruteforce supports 2 or 3 involved rate components, got " +
                                  std::to_string(dims));

            auto position = [&](int seg) {
                return static_cast<int>(std::lower_bound(comps.begin(), comps.end(), seg) -
                                        comps.begin());
            };
            struct FlatPair {
                int ia, ib, mult;
            };
            std::vector<FlatPair> fp;
            for (int p = 0; p < npairs; ++p)
                fp.push_back({position(key.flat[static_cast<size_t>(3 * p)]),
                              position(key.flat[static_cast<size_t>(3 * p) + 1]),
                              key.flat[static_cast<size_t>(3 * p) + 2]});

            std::vector<double> log_norm(comps.size());
            for (size_t c = 0; c < comps.size(); ++c) {
                const double alpha = config.alphas[static_cast<size_t>(comps[c]) - 1];
                log_norm[c] = alpha * std::log(config.beta) - boost::math::lgamma(alpha);
            }
            const double beta = config.beta;
            const int kappa_max = trunc.kappa_max;

            auto integrand = [&](const double* lam) {
                double lg = 0.0;
                for (size_t c = 0; c < comps.size(); ++c) {
                    const double alpha = config.alphas[static_cast<size_t>(comps[c]) - 1];
                    lg += log_norm[c] + (alpha - 1.0) * std::log(lam[c]) - beta * lam[c];
                }
                double f = std::exp(lg);
                for (const auto& pr : fp) {
                    const double aff = sqrt_poisson_affinity(lam[pr.ia], lam[pr.ib], kappa_max);
                    for (int m = 0; m < pr.mult; ++m) f *= aff;
                }
                return f;
            };

            QuadratureResult res;
            if (dims == 2) {
                std::array<GammaAxis, 2> axes{};
                for (int c = 0; c < 2; ++c)
                    axes[static_cast<size_t>(c)] = {
                        config.alphas[static_cast<size_t>(comps[static_cast<size_t>(c)]) - 1],
                        beta};
                res = integrate_2d(
                    [&](double x, double y) {
                        const double lam[2] = {x, y};
                        return integrand(lam);
                    },
                    axes, trunc.quad);
            } else {
                std::array<GammaAxis, 3> axes{};
                for (int c = 0; c < 3; ++c)
                    axes[static_cast<size_t>(c)] = {
                        config.alphas[static_cast<size_t>(comps[static_cast<size_t>(c)]) - 1],
                        beta};
                res = integrate_3d(
                    [&](double x, double y, double z) {
                        const double lam[3] = {x, y, z};
                        return integrand(lam);
                    },
                    axes, trunc.quad);
            }
            if (!res.converged)
                throw QuadratureError("zeta_bruteforce rate integral did not converge (error " +
                                      std::to_string(res.error_estimate) + " after " +
                                      std::to_string(res.evaluations) + " evaluations)");
            value = res.value;
        }
        acc += static_cast<double>(count) * value;
    }
    return acc / static_cast<double>(ipow(config.tau, config.K));
}

std::vector<std::vector<int>> enumerate_members(int tau, int hk, int hl, int k, int l, int K) {
    if (tau < 1 || K < 1 || k < 1 || k > K || l < 1 || l > K)
        throw ConfigError("enumerate_members needs 1 <= k,l <= K and tau >= 1");
    std::vector<std::vector<int>> out;
    for_each_support_point(tau, K, [&](const std::vector<int>& steps,
                                       const std::vector<int>& locations) {
        if (member_of_J(locations, tau, hk, hl, k, l)) out.push_back(steps);
    });
    return out;
}

Rational cardinality_ratio(CardCase c, int tau, int hk, int hl, int k, int l, int K) {
    if (l < k) {
        std::swap(k, l);
        std::swap(hk, hl);
    }
    const bool pattern_ok = (c == CardCase::UT && l > k + 1) ||
                            (c == CardCase::FSD && l == k + 1) || (c == CardCase::D && l == k);
    if (!pattern_ok)
        throw ConfigError("cardinality case tag does not match the (k, l) pattern");

    Rational r;
    r.num = static_cast<long long>(enumerate_members(tau, hk, hl, k, l, K).size());
    r.den = ipow(tau, K);
    return r;
}

std::vector<std::pair<int, int>> table_step_bounds(int tau, int hk, int hl, int k, int l,
                                                   int K) {
    if (tau < 1 || K < 1 || k < 1 || k > K || l < 1 || l > K)
        throw ConfigError("table_step_bounds needs 1 <= k,l <= K and tau >= 1");

    // Steps i and i+1 absorb a shift of +h at changepoint i; collect every
    // shift hitting each step and intersect the induced interval constraints.
    std::vector<std::vector<int>> shifts(static_cast<size_t>(K) + 1);
    auto add = [&](int idx, int h) {
        shifts[static_cast<size_t>(idx)].push_back(h);
    };
    add(k, hk);
    if (k + 1 <= K) add(k + 1, -hk);
    add(l, hl);
    if (l + 1 <= K) add(l + 1, -hl);

    std::vector<std::pair<int, int>> bounds(static_cast<size_t>(K));
    for (int i = 1; i <= K; ++i) {
        int lo = 1;
        int hi = tau;
        for (int s : shifts[static_cast<size_t>(i)]) {
            lo = std::max(lo, 1 - s);
            hi = std::min(hi, tau - s);
        }
        bounds[static_cast<size_t>(i) - 1] = {lo, hi};
    }
    return bounds;
}

BlockMcResult block_mc(const ModelConfig& config, const OffsetVector& h, int runs,
                       std::uint64_t seed, int threads) {
    require_valid(config);
    if (static_cast<int>(h.h.size()) != config.K)
        throw ConfigError("offset vector must have K entries");
    if (runs < 2) throw ConfigError("block_mc needs runs >= 2");

    const int K = config.K;
    const int d = 2 * K + 1;

    std::vector<Eigen::VectorXd> thetas(static_cast<size_t>(runs));
    std::vector<Eigen::VectorXd> psis(static_cast<size_t>(runs));
    std::vector<std::exception_ptr> failures(static_cast<size_t>(runs));

    parallel_for(runs, threads, [&](int r) {
        try {
            auto engine = make_engine(seed, 3, static_cast<std::uint64_t>(r));
            const ParameterDraw draw = sample_prior(config, engine);
            const Dataset data = sample_observations(draw, config, engine);

            Eigen::VectorXd theta(d);
            for (int j = 0; j <= K; ++j) theta(j) = draw.lambdas[static_cast<size_t>(j)];
            for (int j = 0; j < K; ++j)
                theta(K + 1 + j) = static_cast<double>(draw.locations[static_cast<size_t>(j)]);

            Eigen::VectorXd psi(d);
            // Score of the joint density in each rate: the Poisson terms plus
            // the gamma prior terms.
            int prev = 0;
            for (int j = 0; j <= K; ++j) {
                const int next = j < K ? draw.locations[static_cast<size_t>(j)] : config.T;
                double sum = 0.0;
                for (int t = prev; t < next; ++t)
                    sum += static_cast<double>(data.counts[static_cast<size_t>(t)]);
                const double lam = draw.lambdas[static_cast<size_t>(j)];
                psi(j) = static_cast<double>(prev - next) + sum / lam +
                         (config.alphas[static_cast<size_t>(j)] - 1.0) / lam - config.beta;
                prev = next;
            }

            const double lj0 = log_joint(data, draw, config);
            for (int j = 0; j < K; ++j) {
                ParameterDraw up = draw;
                up.locations[static_cast<size_t>(j)] += h.h[static_cast<size_t>(j)];
                ParameterDraw down = draw;
                down.locations[static_cast<size_t>(j)] -= h.h[static_cast<size_t>(j)];
                const double plus = std::exp(0.5 * (log_joint(data, up, config) - lj0));
                const double minus = std::exp(0.5 * (log_joint(data, down, config) - lj0));
                psi(K + 1 + j) = plus - minus;
            }

            thetas[static_cast<size_t>(r)] = std::move(theta);
            psis[static_cast<size_t>(r)] = std::move(psi);
        } catch (...) {
            failures[static_cast<size_t>(r)] = std::current_exception();
        }
    });

    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);

    BlockMcResult res;
    res.runs = runs;
    res.seed = seed;
    Eigen::MatrixXd v_sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd v_sq = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd p_sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd p_sq = Eigen::MatrixXd::Zero(d, d);
    for (int r = 0; r < runs; ++r) {
        const Eigen::MatrixXd v = thetas[static_cast<size_t>(r)] *
                                  psis[static_cast<size_t>(r)].transpose();
        const Eigen::MatrixXd p = psis[static_cast<size_t>(r)] *
                                  psis[static_cast<size_t>(r)].transpose();
        v_sum += v;
        v_sq += v.cwiseProduct(v);
        p_sum += p;
        p_sq += p.cwiseProduct(p);
    }
    const double n = static_cast<double>(runs);
    res.V = v_sum / n;
    res.P = p_sum / n;
    res.V_stderr = ((v_sq / n - res.V.cwiseProduct(res.V)) * (n / (n - 1.0)) / n)
                       .cwiseMax(0.0)
                       .cwiseSqrt();
    res.P_stderr = ((p_sq / n - res.P.cwiseProduct(res.P)) * (n / (n - 1.0)) / n)
                       .cwiseMax(0.0)
                       .cwiseSqrt();
    return res;
}

} // namespace ccwb
