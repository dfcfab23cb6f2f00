#include "doctest.h"

#include "ccwb/harness.hpp"
#include "ccwb/model.hpp"

#include <cmath>
#include <vector>

namespace {

ccwb::ModelConfig tiny() { return {20, 1, 5, {3.0, 3.0}, 1.0}; }

} // namespace

TEST_CASE("estimate_gmse with an oracle estimator is exactly zero") {
    auto c = tiny();
    ccwb::EstimatorFn oracle = [](const ccwb::ModelConfig&, const ccwb::Dataset&,
                                  const ccwb::ParameterDraw& truth) {
        return ccwb::EstimateOut{truth.lambdas, truth.locations};
    };
    auto report = ccwb::estimate_gmse(c, 200, 77, 1, oracle);
    CHECK(report.gmse.norm() == 0.0);
    CHECK(report.runs == 200);
    for (double g : report.grmse_t) CHECK(g == 0.0);
}

TEST_CASE("estimate_gmse with a constant estimator matches prior moments") {
    auto c = tiny();
    ccwb::EstimatorFn zero = [](const ccwb::ModelConfig& cfg, const ccwb::Dataset&,
                                const ccwb::ParameterDraw&) {
        return ccwb::EstimateOut{std::vector<double>(cfg.K + 1, 0.0),
                                 std::vector<int>(cfg.K, 1)};
    };
    const int runs = 10000;
    auto report = ccwb::estimate_gmse(c, runs, 5, 1, zero);
    // E[lambda^2] = alpha(alpha+1)/beta^2 = 12; sd of the mean of lambda^2 is
    // sqrt((E[lambda^4] - E[lambda^2]^2)/runs) = sqrt(216/runs)
    double se = std::sqrt(216.0 / runs);
    CHECK(std::abs(report.gmse(0, 0) - 12.0) < 3.0 * se);
    CHECK(std::abs(report.gmse(1, 1) - 12.0) < 3.0 * se);
    CHECK(report.grmse_lambda[0] == doctest::Approx(std::sqrt(report.gmse(0, 0))));
}

TEST_CASE("estimate_gmse deterministic across seeds and threads") {
    auto c = tiny();
    auto a = ccwb::estimate_gmse(c, 60, 42, 1);
    auto b = ccwb::estimate_gmse(c, 60, 42, 1);
    auto threaded = ccwb::estimate_gmse(c, 60, 42, 3);
    CHECK((a.gmse - b.gmse).norm() == 0.0);
    CHECK((a.gmse - threaded.gmse).norm() == 0.0);
    CHECK(a.grmse_t[0] == threaded.grmse_t[0]);
    CHECK(a.grmse_t_stderr[0] == threaded.grmse_t_stderr[0]);

    auto other = ccwb::estimate_gmse(c, 60, 43, 1);
    CHECK((a.gmse - other.gmse).norm() != 0.0);
}

TEST_CASE("estimate_gmse matrix is symmetric PSD") {
    auto c = tiny();
    auto report = ccwb::estimate_gmse(c, 100, 9);
    CHECK((report.gmse - report.gmse.transpose()).norm() <= 1e-12 * report.gmse.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.gmse);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * report.gmse.trace());
}

TEST_CASE("default_snr_grid spans the reference sweep") {
    auto grid = ccwb::default_snr_grid();
    REQUIRE(grid.size() == 36);
    CHECK(grid.front() == doctest::Approx(-20.0));
    CHECK(grid.back() == doctest::Approx(15.0));
}

TEST_CASE("snr_sweep maps dB to the second shape") {
    auto c = tiny();
    ccwb::QuadratureSpec quad;
    ccwb::SweepOptions opt;
    opt.h_max = 2;
    opt.sign_mode = ccwb::SignMode::positive;
    auto pts = ccwb::snr_sweep(c, {0.0, 10.0}, 30, 11, quad, opt);
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].alpha2 == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(pts[1].alpha2 == doctest::Approx(3.0 * (1.0 + std::sqrt(10.0))).epsilon(1e-12));
    for (const auto& p : pts) {
        CHECK(p.ok);
        CHECK(p.status == "ok");
        CHECK(p.bound_t1 > 0.0);
        CHECK(p.grmse_t1 > 0.0);
        CHECK(p.bound_lambda.size() == 2);
    }
}

TEST_CASE("snr_sweep deterministic across thread counts") {
    auto c = tiny();
    ccwb::QuadratureSpec quad;
    ccwb::SweepOptions one;
    one.h_max = 2;
    one.sign_mode = ccwb::SignMode::positive;
    ccwb::SweepOptions three = one;
    three.threads = 3;
    auto a = ccwb::snr_sweep(c, {0.0, 5.0, 10.0}, 25, 21, quad, one);
    auto b = ccwb::snr_sweep(c, {0.0, 5.0, 10.0}, 25, 21, quad, three);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].grmse_t1 == b[i].grmse_t1);
        CHECK(a[i].bound_t1 == b[i].bound_t1);
        CHECK(a[i].grmse_t1_stderr == b[i].grmse_t1_stderr);
    }
}
