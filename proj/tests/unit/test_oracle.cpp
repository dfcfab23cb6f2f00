#include "doctest.h"

#include "ccwb/bound.hpp"
#include "ccwb/kernels.hpp"
#include "ccwb/model.hpp"
#include "ccwb/oracle.hpp"
#include "ccwb/quadrature.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

namespace {

// brute-force sums tolerate a coarser rate integral
ccwb::QuadratureSpec oracle_quad() {
    ccwb::QuadratureSpec q;
    q.rel_tol = 1e-4;
    return q;
}

} // namespace

TEST_CASE("make_truncation sizes the count sums") {
    ccwb::ModelConfig c{6, 1, 3, {3.0, 3.0}, 1.0};
    auto trunc = ccwb::make_truncation(c, oracle_quad());
    CHECK(trunc.kappa_max > 0);
    CHECK(trunc.lambda_hi > 0.0);

    ccwb::ModelConfig hot = c;
    hot.alphas = {20.0, 20.0};
    auto wider = ccwb::make_truncation(hot, oracle_quad());
    CHECK(wider.kappa_max > trunc.kappa_max);
}

TEST_CASE("zeta_bruteforce reproduces the affinity identities") {
    ccwb::ModelConfig c{6, 1, 3, {3.0, 3.0}, 1.0};
    auto trunc = ccwb::make_truncation(c, oracle_quad());

    ccwb::KernelParams p;
    p.alpha_k = 3.0;
    p.alpha_k1 = 3.0;
    p.beta = 1.0;
    p.tau = 3;

    double z_same = ccwb::zeta_bruteforce(1, 1, 1, 1, c, trunc);
    CHECK(z_same == doctest::Approx(ccwb::u_fn(3, 1, 1, 1)).epsilon(1e-3));

    double z_half = ccwb::zeta_bruteforce(1, 0, 1, 1, c, trunc);
    double expect_half = ccwb::u_fn(3, 1, 1, 1) * ccwb::big_phi(1, p, oracle_quad());
    CHECK(z_half == doctest::Approx(expect_half).epsilon(1e-3));

    double z_opp = ccwb::zeta_bruteforce(1, -1, 1, 1, c, trunc);
    double expect_opp = ccwb::u_fn(3, 2, 1, 1) * ccwb::big_phi(2, p, oracle_quad());
    CHECK(z_opp == doctest::Approx(expect_opp).epsilon(1e-3));
}

TEST_CASE("p22 off-diagonal matches the four-term bracket in the overlap regime") {
    // h = (2,2) activates the geometric series inside zeta(2,-2); this pins
    // the sign and limit of the series term end to end
    ccwb::ModelConfig c{8, 2, 3, {3.0, 3.0, 3.0}, 1.0};
    auto trunc = ccwb::make_truncation(c, oracle_quad());
    const int k = 1;
    const int l = 2;
    double bracket = ccwb::zeta_bruteforce(2, 2, k, l, c, trunc) +
                     ccwb::zeta_bruteforce(-2, -2, k, l, c, trunc) -
                     ccwb::zeta_bruteforce(-2, 2, k, l, c, trunc) -
                     ccwb::zeta_bruteforce(2, -2, k, l, c, trunc);
    double closed = ccwb::p22_offdiag(1, 2, 2, c, oracle_quad());
    CHECK(std::abs(closed - bracket) <= 1e-2 * std::max(std::abs(closed), 1e-6));
}

TEST_CASE("cardinality_ratio closed forms") {
    using ccwb::CardCase;
    using ccwb::Rational;

    // diagonal, last index: (tau-|h|)/tau
    CHECK(ccwb::cardinality_ratio(CardCase::D, 4, 3, 3, 2, 2, 2) == Rational{1, 4});
    // diagonal, interior index: (tau-|h|)^2/tau^2
    CHECK(ccwb::cardinality_ratio(CardCase::D, 4, 2, 2, 1, 1, 2) == Rational{4, 16});
    // far-apart pair factorizes into two u values
    CHECK(ccwb::cardinality_ratio(CardCase::UT, 3, 2, -1, 1, 3, 3) == Rational{2, 27});
    CHECK(ccwb::cardinality_ratio(CardCase::UT, 3, -2, 1, 1, 3, 3) == Rational{2, 27});
    // adjacent pair, mixed signs, no overlap: tau - max(|hk|,|hl|) factor
    CHECK(ccwb::cardinality_ratio(CardCase::FSD, 3, 2, -1, 1, 2, 2) == Rational{1, 9});
    // adjacent pair, equal signs: tau - |hk| - |hl| factor, empty here
    CHECK(ccwb::cardinality_ratio(CardCase::FSD, 2, 1, 1, 1, 2, 2) == Rational{0, 4});
}

TEST_CASE("enumerate_members agrees with direct support membership") {
    for (int tau = 2; tau <= 3; ++tau) {
        for (int K = 2; K <= 3; ++K) {
            ccwb::ModelConfig c{3 * K + 1, K, tau, std::vector<double>(K + 1, 3.0), 1.0};
            if (tau > ccwb::tau_max(c.T, K)) continue;
            for (int k = 1; k <= K; ++k) {
                for (int l = k; l <= K; ++l) {
                    for (int hk = -2; hk <= 2; ++hk) {
                        for (int hl = -2; hl <= 2; ++hl) {
                            if (hk == 0 || hl == 0) continue;
                            if (l == k && hl != hk) continue;
                            auto members = ccwb::enumerate_members(tau, hk, hl, k, l, K);

                            // count every admissible step vector directly
                            int direct = 0;
                            std::vector<int> steps(K, 1);
                            while (true) {
                                std::vector<int> loc(K);
                                int acc = 0;
                                for (int i = 0; i < K; ++i) {
                                    acc += steps[i];
                                    loc[i] = acc;
                                }
                                auto shift = [&](int idx, int off) {
                                    auto moved = loc;
                                    moved[idx - 1] += off;
                                    return ccwb::in_location_support(moved, c);
                                };
                                if (ccwb::in_location_support(loc, c) && shift(k, hk) &&
                                    shift(l, hl))
                                    ++direct;
                                int d = K - 1;
                                while (d >= 0 && steps[d] == tau) steps[d--] = 1;
                                if (d < 0) break;
                                ++steps[d];
                            }
                            CHECK(int(members.size()) == direct);

                            auto box = ccwb::table_step_bounds(tau, hk, hl, k, l, K);
                            long long volume = 1;
                            for (auto [lo, hi] : box)
                                volume *= std::max(0, hi - lo + 1);
                            CHECK(volume == direct);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("block_mc zero patterns and unit top block") {
    ccwb::ModelConfig c{16, 3, 3, {3.0, 3.5, 4.0, 4.5}, 1.0};
    ccwb::OffsetVector h{{1, 1, 1}};
    auto mc = ccwb::block_mc(c, h, 20000, 123);
    REQUIRE(mc.P.rows() == 7);

    auto within = [&](double value, double se, double sigmas) {
        return std::abs(value) <= sigmas * se;
    };
    // P11 off-diagonal, P12 outside the central diagonals, far P22 entries
    CHECK(within(mc.P(0, 1), mc.P_stderr(0, 1), 4.0));
    CHECK(within(mc.P(0, 2), mc.P_stderr(0, 2), 4.0));
    CHECK(within(mc.P(0, 5), mc.P_stderr(0, 5), 4.0));
    CHECK(within(mc.P(4, 6), mc.P_stderr(4, 6), 4.0));
    // E[theta psi_CR^T] top block is -I
    CHECK(std::abs(mc.V(0, 0) + 1.0) <= 4.0 * mc.V_stderr(0, 0));
    CHECK(within(mc.V(0, 1), mc.V_stderr(0, 1), 4.0));

    auto again = ccwb::block_mc(c, h, 20000, 123);
    CHECK((mc.P - again.P).norm() == 0.0);
    auto threaded = ccwb::block_mc(c, h, 20000, 123, 2);
    CHECK((mc.P - threaded.P).norm() == 0.0);
    CHECK((mc.V - threaded.V).norm() == 0.0);
}
