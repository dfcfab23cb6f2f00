#include "ccwb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ccwb {

double gamma_quantile(double shape, double rate, double p) {
    boost::math::gamma_distribution<double> dist(shape, 1.0 / rate);
    return boost::math::quantile(dist, p);
}

namespace {

/// Full 15-point Kronrod rule on [-1,1] with the embedded 7-point Gauss
/// weights aligned by node; Gauss weight is zero at Kronrod-only nodes.
struct Gk15Rule {
    std::array<double, 15> node{};
    std::array<double, 15> wk{};
    std::array<double, 15> wg{};

    Gk15Rule() {
        using K = boost::math::quadrature::gauss_kronrod<double, 15>;
        using G = boost::math::quadrature::gauss<double, 7>;
        const auto& ka = K::abscissa();  // nonnegative half, 8 entries incl. 0
        const auto& kw = K::weights();
        const auto& ga = G::abscissa();  // nonnegative half, 4 entries incl. 0
        const auto& gw = G::weights();
        std::size_t idx = 0;
        for (std::size_t i = 0; i < ka.size(); ++i) {
            double gauss_weight = 0.0;
            for (std::size_t j = 0; j < ga.size(); ++j) {
                if (std::abs(ka[i] - ga[j]) < 1e-12) gauss_weight = gw[j];
            }
            if (ka[i] == 0.0) {
                node[idx] = 0.0;
                wk[idx] = kw[i];
                wg[idx] = gauss_weight;
                ++idx;
            } else {
                node[idx] = -ka[i];
                wk[idx] = kw[i];
                wg[idx] = gauss_weight;
                ++idx;
                node[idx] = ka[i];
                wk[idx] = kw[i];
                wg[idx] = gauss_weight;
                ++idx;
            }
        }
    }
};

const Gk15Rule& rule() {
    static const Gk15Rule r;
    return r;
}

template <int D>
struct Panel {
    std::array<double, D> lo{};
    std::array<double, D> hi{};
    double value = 0.0;      // Kronrod tensor estimate
    double error = 0.0;      // |Kronrod - Gauss|
    int split_axis = 0;
    std::uint64_t id = 0;    // insertion order, breaks heap ties deterministically
};

template <int D>
struct PanelWorse {
    bool operator()(const Panel<D>& a, const Panel<D>& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.id > b.id;
    }
};

constexpr long long ipow(long long b, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

/// Evaluates the tensor rule on one panel: fills value, error and the split
/// axis (largest total variation between adjacent node slabs).
template <int D, typename F>
void evaluate_panel(const F& f, Panel<D>& p) {
    const auto& r = rule();
    std::array<double, 15 * D> x{};
    std::array<double, D> half{};
    for (int d = 0; d < D; ++d) {
        half[d] = 0.5 * (p.hi[d] - p.lo[d]);
        double mid = 0.5 * (p.hi[d] + p.lo[d]);
        for (int i = 0; i < 15; ++i) x[d * 15 + i] = mid + half[d] * r.node[i];
    }
    constexpr long long n = ipow(15, D);
    static thread_local std::vector<double> vals;
    vals.resize(static_cast<std::size_t>(n));

    std::array<int, D> ix{};
    for (long long c = 0; c < n; ++c) {
        long long rem = c;
        for (int d = 0; d < D; ++d) {
            ix[d] = static_cast<int>(rem % 15);
            rem /= 15;
        }
        if constexpr (D == 2) {
            vals[c] = f(x[0 * 15 + ix[0]], x[1 * 15 + ix[1]]);
        } else {
            vals[c] = f(x[0 * 15 + ix[0]], x[1 * 15 + ix[1]], x[2 * 15 + ix[2]]);
        }
    }

    double sk = 0.0, sg = 0.0;
    std::array<double, D> variation{};
    for (long long c = 0; c < n; ++c) {
        long long rem = c;
        double wkp = 1.0, wgp = 1.0;
        for (int d = 0; d < D; ++d) {
            int i = static_cast<int>(rem % 15);
            rem /= 15;
            ix[d] = i;
            wkp *= r.wk[i];
            wgp *= r.wg[i];
        }
        sk += wkp * vals[c];
        sg += wgp * vals[c];
        // Variation against the next node along each axis, as a split cue.
        long long stride = 1;
        for (int d = 0; d < D; ++d) {
            if (ix[d] + 1 < 15) {
                variation[d] += std::abs(vals[c + stride] - vals[c]);
            }
            stride *= 15;
        }
    }
    double scale = 1.0;
    for (int d = 0; d < D; ++d) scale *= half[d];
    p.value = sk * scale;
    p.error = std::abs(sk - sg) * scale;
    int axis = 0;
    double best = -1.0;
    for (int d = 0; d < D; ++d) {
        double v = variation[d] * half[d];
        if (v > best) {
            best = v;
            axis = d;
        }
    }
    p.split_axis = axis;
}

template <int D, typename F>
QuadratureResult integrate_impl(const F& f, const std::array<GammaAxis, D>& axes,
                                const QuadratureSpec& spec) {
    std::array<double, D> lo{}, hi{}, mid{};
    for (int d = 0; d < D; ++d) {
        double p = spec.truncation_quantile;
        lo[d] = gamma_quantile(axes[d].shape, axes[d].rate, 1.0 - p);
        hi[d] = gamma_quantile(axes[d].shape, axes[d].rate, p);
        // First split at the gamma mean to concentrate panels on the mass.
        mid[d] = std::clamp(axes[d].shape / axes[d].rate, lo[d] + 0.25 * (hi[d] - lo[d]),
                            lo[d] + 0.75 * (hi[d] - lo[d]));
    }

    std::priority_queue<Panel<D>, std::vector<Panel<D>>, PanelWorse<D>> heap;
    QuadratureResult res;
    std::uint64_t next_id = 0;
    double total_value = 0.0, total_error = 0.0;

    auto push_panel = [&](const std::array<double, D>& a, const std::array<double, D>& b) {
        Panel<D> p;
        p.lo = a;
        p.hi = b;
        p.id = next_id++;
        evaluate_panel<D>(f, p);
        res.evaluations += ipow(15, D);
        total_value += p.value;
        total_error += p.error;
        heap.push(p);
    };

    // 2^D initial panels split at the per-axis gamma mean.
    for (int mask = 0; mask < (1 << D); ++mask) {
        std::array<double, D> a{}, b{};
        for (int d = 0; d < D; ++d) {
            a[d] = (mask >> d & 1) ? mid[d] : lo[d];
            b[d] = (mask >> d & 1) ? hi[d] : mid[d];
        }
        push_panel(a, b);
    }

    auto tolerance = [&]() { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value)); };

    while (total_error > tolerance() && res.evaluations + ipow(15, D) * 2 <= spec.max_evaluations) {
        Panel<D> worst = heap.top();
        heap.pop();
        total_value -= worst.value;
        total_error -= worst.error;
        int ax = worst.split_axis;
        double cut = 0.5 * (worst.lo[ax] + worst.hi[ax]);
        std::array<double, D> l1 = worst.lo, h1 = worst.hi, l2 = worst.lo, h2 = worst.hi;
        h1[ax] = cut;
        l2[ax] = cut;
        push_panel(l1, h1);
        push_panel(l2, h2);
    }

    res.value = total_value;
    res.error_estimate = total_error;
    res.converged = total_error <= tolerance() && std::isfinite(total_value);
    return res;
}

} // namespace

QuadratureResult integrate_2d(const std::function<double(double, double)>& f,
                              const std::array<GammaAxis, 2>& axes,
                              const QuadratureSpec& spec) {
    return integrate_impl<2>(f, axes, spec);
}

QuadratureResult integrate_3d(const std::function<double(double, double, double)>& f,
                              const std::array<GammaAxis, 3>& axes,
                              const QuadratureSpec& spec) {
    return integrate_impl<3>(f, axes, spec);
}

} // namespace ccwb
