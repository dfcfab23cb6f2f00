#include "verify_suite.hpp"

#include "ccwb/bound.hpp"
#include "ccwb/errors.hpp"
#include "ccwb/kernels.hpp"
#include "ccwb/model.hpp"
#include "ccwb/oracle.hpp"
#include "ccwb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ccwb::cli {

namespace {

void add(std::vector<VerifyCheck>& out, std::string name, double tol, double dev) {
    out.push_back({std::move(name), tol, dev, dev <= tol});
}

void kernel_checks(std::vector<VerifyCheck>& out) {
    add(out, "rho at identical rates is 1", 0.0, std::abs(rho(2.7, 2.7) - 1.0));
    add(out, "rho(1,4) = exp(-1/2)", 1e-12, std::abs(rho(1.0, 4.0) - std::exp(-0.5)));

    KernelParams p{3.0, 3.0, 3.0, 1.0, 10};
    add(out, "varphi((1,1), h=5) = exp(-2)", 1e-12, std::abs(varphi(1.0, 1.0, 5, p) - std::exp(-2.0)));
    add(out, "phi_tri((1,1,1)) = exp(-3)", 1e-12,
        std::abs(phi_tri(1.0, 1.0, 1.0, 3, 3, p) - std::exp(-3.0)));

    QuadratureSpec quad;
    KernelParams p2{3.0, 4.0, 0.0, 1.0, 10};
    add(out, "Phi(0) = 1", 1e-6, std::abs(big_phi(0, p2, quad) - 1.0));
    double phi2 = big_phi(2, p2, quad);
    add(out, "Phi even in h", 1e-12, std::abs(phi2 - big_phi(-2, p2, quad)));
    add(out, "Phi(2) in (0,1]", 0.0, std::max({0.0, phi2 - 1.0, -phi2}));

    add(out, "u(10,3) at k<K = 49/100", 1e-12, std::abs(u_fn(10, 3, 1, 2) - 0.49));
    add(out, "u(10,3) at k=K = 7/10", 1e-12, std::abs(u_fn(10, 3, 2, 2) - 0.7));
    add(out, "u(5,6) = 0 beyond tau", 0.0, std::abs(u_fn(5, 6, 1, 1)));
    add(out, "v(10,2,3) at k<=K-2 = 0.056", 1e-12, std::abs(v_fn(10, 2, 3, 1, 3) - 0.056));
    add(out, "v(10,2,3) at k=K-1 = 8/100", 1e-12, std::abs(v_fn(10, 2, 3, 2, 3) - 0.08));
    add(out, "r((1,4,1)) = exp(-1)", 1e-12, std::abs(r_fn(1.0, 4.0, 1.0) - std::exp(-1.0)));
    add(out, "w(tau=10, h=(1,1)) = -2", 1e-12, std::abs(w_fn(1.3, 2.9, 0.4, 10, 1, 1) + 2.0));
    add(out, "w(tau=10, h=(2,3)) at r=1 = -4", 1e-12, std::abs(w_fn(1.7, 1.7, 1.7, 10, 2, 3) + 4.0));
}

long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

/// Sweeps every tau <= 4, |h| <= 3 (both signs, plus h'=0 on the diagonal
/// case) and K <= 3 index pattern, comparing the enumerated J against the
/// tabulated box bounds and the closed-form u products.
void cardinality_checks(std::vector<VerifyCheck>& out) {
    double dev_count = 0.0, dev_box = 0.0, dev_u = 0.0;
    for (int K = 1; K <= 3; ++K) {
        for (int k = 1; k <= K; ++k) {
            for (int l = k; l <= K; ++l) {
                CardCase c = l == k ? CardCase::D : (l == k + 1 ? CardCase::FSD : CardCase::UT);
                for (int tau = 1; tau <= 4; ++tau) {
                    for (int hk = -3; hk <= 3; ++hk) {
                        if (hk == 0) continue;
                        for (int hl = -3; hl <= 3; ++hl) {
                            if (hl == 0 && c != CardCase::D) continue;
                            auto members = enumerate_members(tau, hk, hl, k, l, K);
                            Rational ratio = cardinality_ratio(c, tau, hk, hl, k, l, K);
                            dev_count = std::max(
                                dev_count,
                                std::abs(static_cast<double>(ratio.num) -
                                         static_cast<double>(members.size())) +
                                    std::abs(static_cast<double>(ratio.den - ipow(tau, K))));

                            auto box = table_step_bounds(tau, hk, hl, k, l, K);
                            long long prod = 1;
                            for (auto [lo, hi] : box) prod *= std::max(0, hi - lo + 1);
                            dev_box += std::abs(static_cast<double>(prod) -
                                                static_cast<double>(members.size()));
                            if (!members.empty()) {
                                for (int i = 0; i < K; ++i) {
                                    int mn = members.front()[i], mx = mn;
                                    for (const auto& m : members) {
                                        mn = std::min(mn, m[i]);
                                        mx = std::max(mx, m[i]);
                                    }
                                    dev_box += std::abs(mn - box[i].first) +
                                               std::abs(mx - box[i].second);
                                }
                            }

                            double got =
                                static_cast<double>(ratio.num) / static_cast<double>(ratio.den);
                            if (c == CardCase::D && hl == hk) {
                                dev_u = std::max(dev_u, std::abs(got - u_fn(tau, hk, k, K)));
                            } else if (c == CardCase::D && hl == -hk) {
                                dev_u = std::max(dev_u, std::abs(got - u_fn(tau, 2 * hk, k, K)));
                            } else if (c == CardCase::D && hl == 0) {
                                dev_u = std::max(dev_u, std::abs(got - u_fn(tau, hk, k, K)));
                            } else if (c == CardCase::UT) {
                                dev_u = std::max(dev_u, std::abs(got - u_fn(tau, hk, k, K) *
                                                                           u_fn(tau, hl, l, K)));
                            }
                        }
                    }
                }
            }
        }
    }
    add(out, "cardinality count matches enumeration (tau<=4,|h|<=3,K<=3)", 0.0, dev_count);
    add(out, "tabulated box bounds match enumeration", 0.0, dev_box);
    add(out, "u closed forms match counts (D and UT)", 1e-12, dev_u);
}

void zeta_checks(std::vector<VerifyCheck>& out) {
    QuadratureSpec quad;
    QuadratureSpec oracle_quad;
    oracle_quad.rel_tol = 1e-4;

    ModelConfig c1{6, 1, 3, {3.0, 3.0}, 1.0};
    TruncationSpec tr1 = make_truncation(c1, oracle_quad);
    KernelParams p1{3.0, 3.0, 0.0, 1.0, 3};

    double z_hh = zeta_bruteforce(1, 1, 1, 1, c1, tr1);
    add(out, "zeta(h,h) = u(tau,h)  [K=1,tau=3]", 1e-3, std::abs(z_hh - u_fn(3, 1, 1, 1)));

    double z_hmh = zeta_bruteforce(1, -1, 1, 1, c1, tr1);
    double closed_hmh = u_fn(3, 2, 1, 1) * big_phi(2, p1, quad);
    add(out, "zeta(h,-h) = u(tau,2h) Phi(2h)", 1e-3, std::abs(z_hmh - closed_hmh));

    double z_h0 = zeta_bruteforce(1, 0, 1, 1, c1, tr1);
    double closed_h0 = u_fn(3, 1, 1, 1) * big_phi(1, p1, quad);
    add(out, "zeta(h,0) = u(tau,h) Phi(h)", 1e-3, std::abs(z_h0 - closed_h0));

    add(out, "V22 entry matches -h zeta(h,0)", 1e-3,
        std::abs(v22_entry(1, 1, c1, quad) - (-1.0) * z_h0));
    double b1_brute = zeta_bruteforce(1, 1, 1, 1, c1, tr1) +
                      zeta_bruteforce(-1, -1, 1, 1, c1, tr1) -
                      zeta_bruteforce(-1, 1, 1, 1, c1, tr1) -
                      zeta_bruteforce(1, -1, 1, 1, c1, tr1);
    add(out, "P22 diagonal matches zeta combination", 1e-3,
        std::abs(p22_diag(1, 1, c1, quad) - b1_brute));

    // tau=3 admits |h|=2 so the overlap geometric term is active here
    ModelConfig c2{8, 2, 3, {3.0, 3.0, 3.0}, 1.0};
    TruncationSpec tr2 = make_truncation(c2, oracle_quad);
    double c1_brute = zeta_bruteforce(2, 2, 1, 2, c2, tr2) +
                      zeta_bruteforce(-2, -2, 1, 2, c2, tr2) -
                      zeta_bruteforce(-2, 2, 1, 2, c2, tr2) -
                      zeta_bruteforce(2, -2, 1, 2, c2, tr2);
    double c1_closed = p22_offdiag(1, 2, 2, c2, quad);
    add(out, "P22 off-diagonal matches zeta combination (overlap active)",
        1e-2 * std::max(std::abs(c1_closed), 1e-6), std::abs(c1_closed - c1_brute));
}

void block_checks(std::vector<VerifyCheck>& out) {
    ModelConfig c{20, 1, 5, {3.0, 4.0}, 1.0};
    QuadratureSpec quad;
    OffsetVector h{{2}};
    BlockMcResult mc = block_mc(c, h, 20000, 424242);

    // sigma-unit deviations; 4 sigma keeps the false alarm rate negligible
    double dev = 0.0;
    for (int k = 1; k <= 2; ++k) {
        double closed = p11_entry(k, c);
        dev = std::max(dev, std::abs(mc.P(k - 1, k - 1) - closed) / mc.P_stderr(k - 1, k - 1));
    }
    add(out, "P11 diagonal within 4 sigma of Monte Carlo", 4.0, dev);

    double dev12 = 0.0;
    for (int k = 1; k <= 2; ++k) {
        double closed = p12_entry(k, 1, 2, c, quad);
        dev12 = std::max(dev12, std::abs(mc.P(k - 1, 2) - closed) / mc.P_stderr(k - 1, 2));
    }
    add(out, "P12 entries within 4 sigma of Monte Carlo", 4.0, dev12);

    double v22_closed = v22_entry(1, 2, c, quad);
    add(out, "V22 entry within 4 sigma of Monte Carlo", 4.0,
        std::abs(mc.V(2, 2) - v22_closed) / mc.V_stderr(2, 2));
}

} // namespace

std::vector<VerifyCheck> run_verify(const std::string& level) {
    if (level != "fast" && level != "full") {
        throw ConfigError("verify: level must be \"fast\" or \"full\", got \"" + level + "\"");
    }
    std::vector<VerifyCheck> out;
    kernel_checks(out);
    cardinality_checks(out);
    if (level == "full") {
        zeta_checks(out);
        block_checks(out);
    }
    return out;
}

bool print_verify_table(const std::vector<VerifyCheck>& checks, std::ostream& os) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-58s  %-10s  %-12s  %s\n", "check", "tolerance",
                  "deviation", "result");
    os << line;
    bool all = true;
    for (const auto& c : checks) {
        std::snprintf(line, sizeof(line), "%-58s  %-10.3g  %-12.4g  %s\n", c.name.c_str(),
                      c.tolerance, c.deviation, c.pass ? "pass" : "FAIL");
        os << line;
        all = all && c.pass;
    }
    return all;
}

} // namespace ccwb::cli
