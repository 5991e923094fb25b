#include "vulnfwd/analytic.hpp"
#include "vulnfwd/market.hpp"
#include "vulnfwd/mc.hpp"
#include "vulnfwd/pde.hpp"
#include "vulnfwd/sweep.hpp"
#include "vulnfwd/upsilon.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

using namespace vulnfwd;

MarketParams baseline() {
    MarketParams p;
    p.s = 1.0;
    p.r = 0.04;
    p.f = 0.06;
    p.q = 0.055;
    p.sigma = 0.30;
    p.h_s = 0.05;
    p.h1 = 0.055;
    p.h2 = 0.055;
    p.r1 = 0.07;
    p.r2 = 0.07;
    p.lambda1 = 0.01;
    p.lambda2 = 0.01;
    p.kappa = 0.0;
    p.mu = 0.04;
    return p;
}

const MarketParams kParams = baseline();
const FundingPolicy kPolicy = FundingPolicy::linearizing(0.5, 0.0);
const ForwardContract kAtmrf{std::exp(0.2), 5.0, 0.0};
const ForwardContract kTatm{std::exp(-0.025), 5.0, 0.0};

void BM_Upsilon0(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(upsilon0(5.0, 0.085, -0.30));
}
BENCHMARK(BM_Upsilon0);

void BM_PriceAtmClosedForm(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(price_atmrf(kAtmrf, kParams, kPolicy).value);
}
BENCHMARK(BM_PriceAtmClosedForm);

void BM_PriceApprox(benchmark::State& state) {
    const ForwardContract c{1.05 * kAtmrf.strike, 5.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(price_approx(c, kParams, kPolicy).value);
}
BENCHMARK(BM_PriceApprox);

void BM_PriceQuadrature(benchmark::State& state) {
    QuadConfig quad;
    quad.abs_tol = std::pow(10.0, -double(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(price_general(kTatm, kParams, kPolicy, quad).value);
}
BENCHMARK(BM_PriceQuadrature)->Arg(6)->Arg(8)->Arg(10);

void BM_McPrice(benchmark::State& state) {
    McConfig cfg;
    cfg.n_paths = std::uint64_t(state.range(0));
    cfg.n_steps = 250;
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_price_qhat(kTatm, kParams, kPolicy, cfg).mean);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McPrice)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_PdeSolve(benchmark::State& state) {
    const int n = int(state.range(0));
    const PdeGrid grid = default_pde_grid(kTatm, kParams, n);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_linear_pde(kTatm, kParams, kPolicy, grid).value);
    state.SetLabel(std::to_string(n) + "x" + std::to_string(n));
}
BENCHMARK(BM_PdeSolve)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SweepRow(benchmark::State& state) {
    SweepSpec spec;
    spec.parameter = "f";
    spec.grid = linspace(0.0, 0.15, 16);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_sweep(spec, kParams, kPolicy, 5.0).size());
    state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_SweepRow)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
