#pragma once

#include <array>
#include <cstdint>
#include <functional>

namespace ccwb {

/// Controls for adaptive integration over the positive orthant.
struct QuadratureSpec {
    double rel_tol = 1e-6;
    double abs_tol = 1e-10;
    long long max_evaluations = 10'000'000;
    /// Per-axis truncation: the domain is [q(1-p), q(p)] where q is the
    /// quantile of the dominating gamma factor and p this value.
    double truncation_quantile = 1.0 - 1e-10;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long long evaluations = 0;
    bool converged = false;
};

/// Shape/rate of the gamma factor dominating one axis of the integrand;
/// used only to truncate the domain, not to weight the rule.
struct GammaAxis {
    double shape = 1.0;
    double rate = 1.0;
};

/// Adaptive tensor Gauss-Kronrod (15/7 embedded pair) integration of f over
/// (0,inf)^2, truncated per axis at gamma-tail quantiles. Deterministic for a
/// fixed spec. converged=false means the evaluation budget ran out first.
QuadratureResult integrate_2d(const std::function<double(double, double)>& f,
                              const std::array<GammaAxis, 2>& axes,
                              const QuadratureSpec& spec);

/// Three-axis version of integrate_2d.
QuadratureResult integrate_3d(const std::function<double(double, double, double)>& f,
                              const std::array<GammaAxis, 3>& axes,
                              const QuadratureSpec& spec);

/// Gamma quantile helper shared with the oracle's truncation bounds.
double gamma_quantile(double shape, double rate, double p);

} // namespace ccwb
