#include <benchmark/benchmark.h>

#include "ccwb/bound.hpp"
#include "ccwb/estimator.hpp"
#include "ccwb/kernels.hpp"
#include "ccwb/model.hpp"
#include "ccwb/quadrature.hpp"
#include "ccwb/rng.hpp"
#include "ccwb/supremum.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace {

ccwb::KernelParams kernel_params() {
    ccwb::KernelParams p;
    p.alpha_k = 3.0;
    p.alpha_k1 = 4.0;
    p.alpha_k2 = 3.5;
    p.beta = 1.0;
    p.tau = 10;
    return p;
}

void BM_BigPhi(benchmark::State& state) {
    auto p = kernel_params();
    ccwb::QuadratureSpec quad;
    int h = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ccwb::big_phi(h, p, quad));
}
BENCHMARK(BM_BigPhi)->Arg(1)->Arg(4)->Arg(12);

void BM_Integrate2d(benchmark::State& state) {
    auto p = kernel_params();
    ccwb::QuadratureSpec quad;
    std::array<ccwb::GammaAxis, 2> axes{{{p.alpha_k, p.beta}, {p.alpha_k1, p.beta}}};
    auto f = [&](double y1, double y2) { return ccwb::varphi(y1, y2, 3, p); };
    for (auto _ : state) benchmark::DoNotOptimize(ccwb::integrate_2d(f, axes, quad));
}
BENCHMARK(BM_Integrate2d);

void BM_Integrate3d(benchmark::State& state) {
    auto p = kernel_params();
    ccwb::QuadratureSpec quad;
    std::array<ccwb::GammaAxis, 3> axes{
        {{p.alpha_k, p.beta}, {p.alpha_k1, p.beta}, {p.alpha_k2, p.beta}}};
    auto f = [&](double z1, double z2, double z3) {
        return ccwb::phi_tri(z1, z2, z3, 2, 1, p);
    };
    for (auto _ : state) benchmark::DoNotOptimize(ccwb::integrate_3d(f, axes, quad));
}
BENCHMARK(BM_Integrate3d);

void BM_AssembleBound(benchmark::State& state) {
    int K = int(state.range(0));
    ccwb::ModelConfig c{8 * K + 1, K, 8, {}, 1.0};
    for (int k = 0; k <= K; ++k) c.alphas.push_back(3.0 + 0.5 * k);
    ccwb::OffsetVector h;
    for (int k = 0; k < K; ++k) h.h.push_back(2);
    ccwb::QuadratureSpec quad;
    for (auto _ : state) {
        // a fresh cache per iteration keeps the Phi integrals in the timing
        ccwb::PhiCache cache;
        benchmark::DoNotOptimize(ccwb::assemble_bound(h, c, quad, &cache));
    }
}
BENCHMARK(BM_AssembleBound)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MapChangepoints(benchmark::State& state) {
    int K = int(state.range(0));
    ccwb::ModelConfig c{40 * K, K, ccwb::tau_max(40 * K, K), {}, 1.0};
    for (int k = 0; k <= K; ++k) c.alphas.push_back(3.0 + 6.0 * k);
    auto rng = ccwb::make_engine(ccwb::derive_seed(7, 0, 0, 0));
    auto draw = ccwb::sample_prior(c, rng);
    auto data = ccwb::sample_observations(draw, c, rng);
    for (auto _ : state) benchmark::DoNotOptimize(ccwb::map_changepoints(c, data));
}
BENCHMARK(BM_MapChangepoints)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MveeSup(benchmark::State& state) {
    int members = int(state.range(0));
    const int dim = 3;
    ccwb::EllipsoidSet ells;
    ells.dim = dim;
    auto rng = ccwb::make_engine(19);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int m = 0; m < members; ++m) {
        Eigen::MatrixXd g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) g(i, j) = gauss(rng);
        Eigen::MatrixXd r = g * g.transpose() + Eigen::MatrixXd::Identity(dim, dim);
        ells.members.push_back({ccwb::OffsetVector{{m + 1}}, r});
    }
    for (auto _ : state) benchmark::DoNotOptimize(ccwb::mvee_sup(ells, 1e-9));
}
BENCHMARK(BM_MveeSup)->Arg(2)->Arg(8)->Arg(24)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
