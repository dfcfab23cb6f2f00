#include "doctest.h"

#include "ccwb/errors.hpp"
#include "ccwb/model.hpp"
#include "ccwb/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace {

bool mentions(const std::vector<std::string>& report, const char* needle) {
    return std::any_of(report.begin(), report.end(), [&](const std::string& s) {
        return s.find(needle) != std::string::npos;
    });
}

double gamma_log_pdf(double x, double alpha, double beta) {
    return alpha * std::log(beta) - std::lgamma(alpha) + (alpha - 1.0) * std::log(x) -
           beta * x;
}

} // namespace

TEST_CASE("tau_max floor") {
    CHECK(ccwb::tau_max(80, 1) == 79);
    CHECK(ccwb::tau_max(10, 3) == 3);
    CHECK(ccwb::tau_max(7, 2) == 3);
    CHECK(ccwb::tau_max(2, 1) == 1);
}

TEST_CASE("validate_config reports every violation") {
    ccwb::ModelConfig good{80, 1, 79, {3.0, 3.0}, 1.0};
    CHECK(ccwb::validate_config(good).empty());

    ccwb::ModelConfig tau_over = good;
    tau_over.tau = 80;
    CHECK(mentions(ccwb::validate_config(tau_over), "tau"));

    ccwb::ModelConfig alpha_low = good;
    alpha_low.alphas = {2.0, 3.0};
    CHECK(mentions(ccwb::validate_config(alpha_low), "alpha"));

    ccwb::ModelConfig beta_bad = good;
    beta_bad.beta = 0.0;
    CHECK(mentions(ccwb::validate_config(beta_bad), "beta"));

    ccwb::ModelConfig k_bad = good;
    k_bad.K = 80;
    CHECK_FALSE(ccwb::validate_config(k_bad).empty());

    CHECK_THROWS_AS(ccwb::require_valid(tau_over), ccwb::ConfigError);
}

TEST_CASE("sample_prior support and determinism") {
    ccwb::ModelConfig degenerate{10, 3, 1, {3.0, 3.0, 3.0, 3.0}, 1.0};
    auto rng = ccwb::make_engine(5);
    auto draw = ccwb::sample_prior(degenerate, rng);
    CHECK(draw.locations == std::vector<int>{1, 2, 3});

    ccwb::ModelConfig c{40, 2, 6, {3.0, 4.0, 5.0}, 2.0};
    auto r1 = ccwb::make_engine(99);
    auto r2 = ccwb::make_engine(99);
    auto d1 = ccwb::sample_prior(c, r1);
    auto d2 = ccwb::sample_prior(c, r2);
    CHECK(d1.lambdas == d2.lambdas);
    CHECK(d1.locations == d2.locations);
    CHECK(ccwb::in_location_support(d1.locations, c));
}

TEST_CASE("sample_prior gamma moments and location marginal") {
    ccwb::ModelConfig c{20, 1, 4, {3.0, 3.0}, 1.0};
    const int n = 100000;
    auto rng = ccwb::make_engine(7);
    double sum = 0.0;
    std::vector<int> loc_counts(5, 0);
    for (int i = 0; i < n; ++i) {
        auto d = ccwb::sample_prior(c, rng);
        sum += d.lambdas[0];
        REQUIRE(d.locations[0] >= 1);
        REQUIRE(d.locations[0] <= 4);
        ++loc_counts[d.locations[0]];
    }
    // mean alpha/beta = 3, sd of the sample mean sqrt(3/n)
    double se_mean = std::sqrt(3.0 / n);
    CHECK(std::abs(sum / n - 3.0) < 3.0 * se_mean);
    // Pr(t_1 = l) = 1/tau for each step value
    double p = 0.25;
    double se_p = std::sqrt(p * (1 - p) / n);
    for (int l = 1; l <= 4; ++l) {
        CHECK(std::abs(loc_counts[l] / double(n) - p) < 3.0 * se_p);
    }
}

TEST_CASE("sample_observations segment means and determinism") {
    ccwb::ModelConfig c{80, 1, 79, {3.0, 3.0}, 1.0};
    ccwb::ParameterDraw params{{2.0, 20.0}, {40}};

    auto r1 = ccwb::make_engine(3);
    auto r2 = ccwb::make_engine(3);
    auto a = ccwb::sample_observations(params, c, r1, 3);
    auto b = ccwb::sample_observations(params, c, r2, 3);
    CHECK(a.counts == b.counts);
    CHECK(a.seed == 3);
    CHECK(int(a.counts.size()) == c.T);

    const int reps = 10000;
    auto rng = ccwb::make_engine(11);
    double lo = 0.0;
    double hi = 0.0;
    for (int i = 0; i < reps; ++i) {
        auto d = ccwb::sample_observations(params, c, rng);
        for (int t = 0; t < 40; ++t) lo += double(d.counts[t]);
        for (int t = 40; t < 80; ++t) hi += double(d.counts[t]);
    }
    double n_each = 40.0 * reps;
    CHECK(std::abs(lo / n_each - 2.0) < 3.0 * std::sqrt(2.0 / n_each));
    CHECK(std::abs(hi / n_each - 20.0) < 3.0 * std::sqrt(20.0 / n_each));
}

TEST_CASE("sample_observations near-zero rate") {
    ccwb::ModelConfig c{50, 1, 49, {3.0, 3.0}, 1.0};
    ccwb::ParameterDraw params{{1e-8, 1e-8}, {25}};
    auto rng = ccwb::make_engine(1);
    auto d = ccwb::sample_observations(params, c, rng);
    for (auto v : d.counts) CHECK(v == 0);
}

TEST_CASE("log_joint hand value and support indicator") {
    ccwb::ModelConfig c{2, 1, 1, {3.0, 3.0}, 1.0};
    ccwb::Dataset data{{0, 0}, 0};

    // likelihood e^{-2}, two Gamma(3,1) densities at 1, location prior log 1
    ccwb::ParameterDraw params{{1.0, 1.0}, {1}};
    double expected = -2.0 + 2.0 * gamma_log_pdf(1.0, 3.0, 1.0);
    CHECK(ccwb::log_joint(data, params, c) == doctest::Approx(expected).epsilon(1e-12));

    ccwb::ParameterDraw outside{{1.0, 1.0}, {2}};
    CHECK(ccwb::log_joint(data, outside, c) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log_joint beta shift moves only prior terms") {
    ccwb::ModelConfig c1{6, 1, 3, {3.0, 4.0}, 1.0};
    ccwb::ModelConfig c2 = c1;
    c2.beta = 2.0;
    ccwb::Dataset data{{1, 0, 2, 5, 4, 6}, 0};
    ccwb::ParameterDraw params{{1.3, 4.2}, {3}};
    double diff = ccwb::log_joint(data, params, c2) - ccwb::log_joint(data, params, c1);
    double expected = (3.0 + 4.0) * std::log(2.0) - (c2.beta - c1.beta) * (1.3 + 4.2);
    CHECK(diff == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_joint likelihood normalizes over counts") {
    ccwb::ModelConfig c{2, 1, 1, {3.0, 3.0}, 1.0};
    ccwb::ParameterDraw params{{0.7, 1.3}, {1}};
    double total = 0.0;
    for (int k1 = 0; k1 <= 40; ++k1) {
        for (int k2 = 0; k2 <= 40; ++k2) {
            ccwb::Dataset d{{k1, k2}, 0};
            total += std::exp(ccwb::log_joint(d, params, c));
        }
    }
    // summing out the counts leaves the prior density of (lambda, t)
    double prior = std::exp(gamma_log_pdf(0.7, 3.0, 1.0) + gamma_log_pdf(1.3, 3.0, 1.0));
    CHECK(total == doctest::Approx(prior).epsilon(1e-10));
}
