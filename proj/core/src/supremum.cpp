#include "ccwb/supremum.hpp"

#include "ccwb/errors.hpp"
#include "ccwb/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

namespace ccwb {
namespace {

// Orthonormal basis of d x d symmetric matrices: unit diagonals and
// (e_i e_j^T + e_j e_i^T)/sqrt(2) for i < j.
struct SymBasis {
    int d = 0;
    std::vector<std::pair<int, int>> ij;

    explicit SymBasis(int dim) : d(dim) {
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) ij.emplace_back(i, j);
    }

    int size() const { return static_cast<int>(ij.size()); }

    double coeff(int a) const { return ij[a].first == ij[a].second ? 1.0 : 1.0 / std::sqrt(2.0); }
};

// tr(W sym_ij W sym_kl) with sym_ij = e_i e_j^T (+ transpose when i != j),
// basis normalization applied by the caller. W must be symmetric.
double quad_term(const Eigen::MatrixXd& W, int i, int j, int k, int l) {
    double s = W(j, k) * W(l, i);
    if (k != l) s += W(j, l) * W(k, i);
    if (i != j) {
        s += W(i, k) * W(l, j);
        if (k != l) s += W(i, l) * W(k, j);
    }
    return s;
}

std::optional<double> log_det_if_pd(const Eigen::MatrixXd& A) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) return std::nullopt;
    double ld = 0.0;
    const auto& L = llt.matrixLLT();
    for (int i = 0; i < A.rows(); ++i) {
        if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return std::nullopt;
        ld += 2.0 * std::log(L(i, i));
    }
    return ld;
}

Eigen::MatrixXd pd_inverse(const Eigen::MatrixXd& A) {
    return A.llt().solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
}

// Barrier objective t*logdet(B) + sum_n logdet(R_n - B); nullopt when B is
// outside the feasible interior.
std::optional<double> barrier_value(double t, const Eigen::MatrixXd& B,
                                    const std::vector<const Eigen::MatrixXd*>& rs) {
    auto ldb = log_det_if_pd(B);
    if (!ldb) return std::nullopt;
    double f = t * *ldb;
    for (const auto* r : rs) {
        auto lds = log_det_if_pd(*r - B);
        if (!lds) return std::nullopt;
        f += *lds;
    }
    return f;
}

} // namespace

std::vector<OffsetVector> enumerate_offsets(const ModelConfig& config, int h_max,
                                            SignMode sign_mode) {
    require_valid(config);
    if (h_max < 1 || h_max > config.tau - 1)
        throw ConfigError("h_max must lie in [1, tau-1]; got " + std::to_string(h_max));

    std::vector<int> values;
    if (sign_mode == SignMode::all_signs)
        for (int v = -h_max; v <= -1; ++v) values.push_back(v);
    for (int v = 1; v <= h_max; ++v) values.push_back(v);

    std::vector<OffsetVector> out;
    std::vector<int> idx(config.K, 0);
    for (;;) {
        OffsetVector off;
        off.h.resize(config.K);
        for (int k = 0; k < config.K; ++k) off.h[k] = values[idx[k]];
        out.push_back(std::move(off));
        int pos = config.K - 1;
        while (pos >= 0 && ++idx[pos] == static_cast<int>(values.size())) idx[pos--] = 0;
        if (pos < 0) break;
    }
    return out;
}

SupremumResult mvee_sup(const EllipsoidSet& ells, double tol) {
    if (ells.members.empty()) throw DegenerateInputError("supremum over an empty family");
    const int d = ells.dim;
    if (d < 1) throw DegenerateInputError("supremum dimension must be positive");
    tol = std::max(tol, 1e-12);

    SupremumResult result;

    // Members whose matrix is numerically singular cannot bound a
    // full-dimensional ellipsoid from inside; skip them.
    std::vector<const Eigen::MatrixXd*> rs;
    std::vector<int> kept_index;
    double min_eig_all = std::numeric_limits<double>::infinity();
    for (int n = 0; n < static_cast<int>(ells.members.size()); ++n) {
        const Eigen::MatrixXd& R = ells.members[n].second;
        if (R.rows() != d || R.cols() != d)
            throw DegenerateInputError("member matrix dimension mismatch");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R, Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues().minCoeff();
        const double emax = es.eigenvalues().cwiseAbs().maxCoeff();
        if (!(emin > 1e-12 * std::max(1.0, emax))) {
            std::fprintf(stderr, "warning: dropping singular member %d from supremum family\n", n);
            result.dropped_members.push_back(n);
            continue;
        }
        rs.push_back(&R);
        kept_index.push_back(n);
        min_eig_all = std::min(min_eig_all, emin);
    }
    if (rs.empty())
        throw DegenerateInputError("all members of the supremum family are singular");

    const int N = static_cast<int>(rs.size());
    const SymBasis basis(d);
    const int m = basis.size();

    Eigen::MatrixXd B = 0.45 * min_eig_all * Eigen::MatrixXd::Identity(d, d);

    const int iteration_cap = 4000;
    double t = 1.0;
    for (;;) {
        // Center at the current barrier parameter.
        for (int inner = 0; inner < 60; ++inner) {
            if (++result.iterations > iteration_cap)
                throw NonConvergenceError("covering-ellipsoid solve exceeded iteration budget");

            const Eigen::MatrixXd WB = pd_inverse(B);
            std::vector<Eigen::MatrixXd> ws;
            ws.reserve(static_cast<size_t>(N));
            Eigen::MatrixXd G = t * WB;
            for (const auto* r : rs) {
                ws.push_back(pd_inverse(*r - B));
                G -= ws.back();
            }

            Eigen::VectorXd g(m);
            for (int a = 0; a < m; ++a) {
                auto [i, j] = basis.ij[a];
                g(a) = basis.coeff(a) * (i == j ? G(i, i) : 2.0 * G(i, j));
            }

            // negH = t*Q(B^-1) + sum_n Q(S_n^-1) is positive definite.
            Eigen::MatrixXd negH(m, m);
            for (int a = 0; a < m; ++a) {
                auto [i, j] = basis.ij[a];
                for (int b = a; b < m; ++b) {
                    auto [k, l] = basis.ij[b];
                    double v = t * quad_term(WB, i, j, k, l);
                    for (const auto& w : ws) v += quad_term(w, i, j, k, l);
                    v *= basis.coeff(a) * basis.coeff(b);
                    negH(a, b) = v;
                    negH(b, a) = v;
                }
            }

            Eigen::LDLT<Eigen::MatrixXd> ldlt(negH);
            if (ldlt.info() != Eigen::Success)
                throw NonConvergenceError("Newton system factorization failed");
            const Eigen::VectorXd delta = ldlt.solve(g);
            const double decrement2 = g.dot(delta);
            if (!std::isfinite(decrement2))
                throw NonConvergenceError("Newton decrement is not finite");

            auto f0 = barrier_value(t, B, rs);
            if (!f0) throw NonConvergenceError("barrier iterate left the feasible interior");
            if (decrement2 * 0.5 <= 1e-10 * std::max(1.0, std::abs(*f0))) break;

            Eigen::MatrixXd step = Eigen::MatrixXd::Zero(d, d);
            for (int a = 0; a < m; ++a) {
                auto [i, j] = basis.ij[a];
                const double v = delta(a) * basis.coeff(a);
                step(i, j) += v;
                if (i != j) step(j, i) += v;
            }

            double s = 1.0;
            bool accepted = false;
            while (s > 1e-20) {
                const Eigen::MatrixXd cand = B + s * step;
                auto f1 = barrier_value(t, cand, rs);
                if (f1 && *f1 >= *f0 + 0.25 * s * decrement2) {
                    B = cand;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            if (!accepted)
                throw NonConvergenceError("line search failed in covering-ellipsoid solve");
        }

        if (static_cast<double>(N) * d / t <= tol) break;
        t *= 10.0;
    }

    result.B_star = 0.5 * (B + B.transpose());
    result.kkt_gap = static_cast<double>(N) * d / t;

    const double active_tol = std::sqrt(tol);
    for (int n = 0; n < N; ++n) {
        const Eigen::MatrixXd S = *rs[n] - result.B_star;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
        const double scale = std::max(1.0, rs[n]->cwiseAbs().maxCoeff());
        if (es.eigenvalues().minCoeff() <= active_tol * scale)
            result.active_members.push_back(kept_index[n]);
    }
    return result;
}

std::vector<double> check_coverage(const Eigen::MatrixXd& B, const EllipsoidSet& ells) {
    std::vector<double> out;
    out.reserve(ells.members.size());
    for (const auto& [off, R] : ells.members) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R - B, Eigen::EigenvaluesOnly);
        out.push_back(es.eigenvalues().minCoeff());
    }
    return out;
}

TightestBoundResult tightest_bound(const ModelConfig& config, int h_max, SignMode sign_mode,
                                   const QuadratureSpec& quad, double tol, int threads) {
    const auto offsets = enumerate_offsets(config, h_max, sign_mode);
    const int count = static_cast<int>(offsets.size());

    std::vector<std::optional<BoundMatrices>> slots(static_cast<size_t>(count));
    std::vector<char> singular(static_cast<size_t>(count), 0);
    std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
    PhiCache cache;

    parallel_for(count, threads, [&](int i) {
        try {
            slots[static_cast<size_t>(i)] =
                assemble_bound(offsets[static_cast<size_t>(i)], config, quad, &cache);
        } catch (const SingularPError&) {
            singular[static_cast<size_t>(i)] = 1;
        } catch (...) {
            errors[static_cast<size_t>(i)] = std::current_exception();
        }
    });

    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    TightestBoundResult out;
    EllipsoidSet ells;
    ells.dim = 2 * config.K + 1;
    for (int i = 0; i < count; ++i) {
        if (singular[static_cast<size_t>(i)]) {
            out.dropped_h.push_back(offsets[static_cast<size_t>(i)]);
            continue;
        }
        out.per_h.push_back(*slots[static_cast<size_t>(i)]);
        ells.members.emplace_back(offsets[static_cast<size_t>(i)], out.per_h.back().R);
    }
    if (ells.members.empty())
        throw EmptySearchSetError("every candidate offset produced a singular information matrix");

    out.sup = mvee_sup(ells, tol);
    return out;
}

int default_h_max(const ModelConfig& config) {
    const int cap = config.K == 1 ? 12 : 4;
    return std::min(config.tau - 1, cap);
}

SignMode default_sign_mode(const ModelConfig& config) {
    return config.K == 1 ? SignMode::all_signs : SignMode::positive;
}

} // namespace ccwb
