#include "doctest.h"

#include "ccwb/errors.hpp"
#include "ccwb/quadrature.hpp"
#include "ccwb/supremum.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace {

ccwb::EllipsoidSet make_set(const std::vector<Eigen::MatrixXd>& mats) {
    ccwb::EllipsoidSet set;
    set.dim = int(mats.front().rows());
    for (const auto& m : mats) set.members.push_back({ccwb::OffsetVector{{1}}, m});
    return set;
}

} // namespace

TEST_CASE("enumerate_offsets counts and contents") {
    ccwb::ModelConfig c1{20, 1, 5, {3.0, 3.0}, 1.0};
    auto pos = ccwb::enumerate_offsets(c1, 3, ccwb::SignMode::positive);
    REQUIRE(pos.size() == 3);
    CHECK(pos[0].h == std::vector<int>{1});
    CHECK(pos[2].h == std::vector<int>{3});

    auto all = ccwb::enumerate_offsets(c1, 2, ccwb::SignMode::all_signs);
    REQUIRE(all.size() == 4);
    bool saw_m2 = false;
    for (const auto& v : all) saw_m2 = saw_m2 || (v.h == std::vector<int>{-2});
    CHECK(saw_m2);

    ccwb::ModelConfig c2{20, 2, 5, {3.0, 3.0, 3.0}, 1.0};
    CHECK(ccwb::enumerate_offsets(c2, 2, ccwb::SignMode::positive).size() == 4);
    CHECK(ccwb::enumerate_offsets(c2, 2, ccwb::SignMode::all_signs).size() == 16);
}

TEST_CASE("mvee_sup analytic cases") {
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(2, 2);
    r1 << 4.0, 0.5, 0.5, 3.0;

    auto single = ccwb::mvee_sup(make_set({r1}), 1e-9);
    CHECK((single.B_star - r1).norm() <= 1e-6 * r1.norm());
    CHECK(single.kkt_gap >= 0.0);

    // nested: r2 <= r1 entrywise in the Loewner order, so r2 binds alone
    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(2, 2);
    big << 4.0, 0.0, 0.0, 3.0;
    Eigen::MatrixXd small = Eigen::MatrixXd::Zero(2, 2);
    small << 1.0, 0.0, 0.0, 2.0;
    auto nested = ccwb::mvee_sup(make_set({big, small}), 1e-9);
    CHECK((nested.B_star - small).norm() <= 1e-6 * small.norm());

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
    a << 1.0, 0.0, 0.0, 4.0;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    b << 4.0, 0.0, 0.0, 1.0;
    auto crossed = ccwb::mvee_sup(make_set({a, b}), 1e-9);
    CHECK((crossed.B_star - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-6);
}

TEST_CASE("mvee_sup containment residuals") {
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(3, 3);
    r1 << 5.0, 1.0, 0.0, 1.0, 4.0, 0.5, 0.0, 0.5, 3.0;
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(3, 3);
    r2 << 2.0, -0.3, 0.1, -0.3, 6.0, 0.0, 0.1, 0.0, 2.5;
    auto set = make_set({r1, r2});
    auto res = ccwb::mvee_sup(set, 1e-9);
    auto cover = ccwb::check_coverage(res.B_star, set);
    for (double eig : cover) CHECK(eig >= -1e-8 * r1.norm());
    CHECK_FALSE(res.active_members.empty());
}

TEST_CASE("check_coverage sign conventions") {
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Zero(2, 2);
    r1 << 2.0, 0.0, 0.0, 1.0;
    auto set = make_set({r1});

    auto exact = ccwb::check_coverage(r1, set);
    CHECK(std::abs(exact[0]) <= 1e-14);

    // doubling the matrix shrinks the ellipsoid, so it no longer covers
    auto too_big = ccwb::check_coverage(2.0 * r1, set);
    CHECK(too_big[0] < 0.0);

    auto zero = ccwb::check_coverage(Eigen::MatrixXd::Zero(2, 2), set);
    CHECK(zero[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mvee_sup rejects empty and flags singular members") {
    Eigen::MatrixXd ok = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd sing = Eigen::MatrixXd::Zero(2, 2);
    sing(0, 0) = 1.0;
    auto res = ccwb::mvee_sup(make_set({ok, sing}), 1e-9);
    CHECK(res.dropped_members == std::vector<int>{1});
    CHECK((res.B_star - ok).norm() <= 1e-6);

    ccwb::EllipsoidSet empty;
    empty.dim = 2;
    CHECK_THROWS_AS(ccwb::mvee_sup(empty, 1e-9), ccwb::DegenerateInputError);
}

TEST_CASE("tightest_bound singleton equals its only member") {
    ccwb::ModelConfig c{20, 1, 5, {3.0, 5.0}, 1.0};
    ccwb::QuadratureSpec quad;
    auto res = ccwb::tightest_bound(c, 1, ccwb::SignMode::positive, quad, 1e-9);
    REQUIRE(res.per_h.size() == 1);
    CHECK((res.sup.B_star - res.per_h[0].R).norm() <= 1e-6 * res.per_h[0].R.norm());
    CHECK(res.dropped_h.empty());
}

TEST_CASE("tightest_bound objective shrinks as the search set grows") {
    ccwb::ModelConfig c{20, 1, 5, {3.0, 5.0}, 1.0};
    ccwb::QuadratureSpec quad;
    double prev = std::numeric_limits<double>::infinity();
    for (int h_max = 1; h_max <= 3; ++h_max) {
        auto res = ccwb::tightest_bound(c, h_max, ccwb::SignMode::positive, quad, 1e-9);
        double det = res.sup.B_star.determinant();
        CHECK(det <= prev * (1.0 + 1e-7));
        prev = det;
    }
}

TEST_CASE("tightest_bound covers every member it kept") {
    ccwb::ModelConfig c{20, 1, 5, {3.0, 5.0}, 1.0};
    ccwb::QuadratureSpec quad;
    auto res = ccwb::tightest_bound(c, 4, ccwb::SignMode::all_signs, quad, 1e-9);
    CHECK(res.per_h.size() == 8);
    for (const auto& bm : res.per_h) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bm.R - res.sup.B_star);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * bm.R.norm());
    }
    CHECK(res.sup.kkt_gap <= 1e-6);
}

TEST_CASE("search defaults") {
    ccwb::ModelConfig k1_small{20, 1, 5, {3.0, 3.0}, 1.0};
    ccwb::ModelConfig k1_wide{80, 1, 79, {3.0, 3.0}, 1.0};
    ccwb::ModelConfig k2{19, 2, 9, {3.0, 3.0, 3.0}, 1.0};
    ccwb::ModelConfig k2_tight{7, 2, 3, {3.0, 3.0, 3.0}, 1.0};

    CHECK(ccwb::default_h_max(k1_small) == 4);
    CHECK(ccwb::default_h_max(k1_wide) == 12);
    CHECK(ccwb::default_h_max(k2) == 4);
    CHECK(ccwb::default_h_max(k2_tight) == 2);

    CHECK(ccwb::default_sign_mode(k1_small) == ccwb::SignMode::all_signs);
    CHECK(ccwb::default_sign_mode(k2) == ccwb::SignMode::positive);
}
