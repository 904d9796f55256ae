#include <benchmark/benchmark.h>

#include "arsar/csa.hpp"
#include "arsar/recon.hpp"
#include "arsar/sampling.hpp"
#include "arsar/sar_params.hpp"

using namespace arsar;

namespace {

ComplexImage noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    ComplexImage a(rows, cols);
    for (auto& z : a.data()) z = rng.complex_normal();
    return a;
}

OperatorContext context(std::size_t n, double rate) {
    const Rng rng(9);
    return OperatorContext(build_phase_plan(default_params(n, n)), make_sampling(Axis::range, n, 1.0, rng.split(1)),
                           make_sampling(Axis::azimuth, n, rate, rng.split(2)));
}

}  // namespace

static void ImagingM(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto plan = build_phase_plan(default_params(n, n));
    const auto y = noise(n, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(imaging_M(plan, y));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(ImagingM)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNLogN);

static void ObservationH(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto plan = build_phase_plan(default_params(n, n));
    const auto x = noise(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(observation_H(plan, x));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(ObservationH)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNLogN);

static void AdjointPairGT(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto ctx = context(n, 0.5);
    const auto x = noise(n, n, 3);
    for (auto _ : state) benchmark::DoNotOptimize(imaging_T(ctx, observation_G(ctx, x)));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(AdjointPairGT)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNLogN);

static void AdmmL1(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto ctx = context(n, 0.5);
    const auto yd = observation_G(ctx, noise(n, n, 4));
    AdmmConfig cfg;
    cfg.lambda = 0.05;
    cfg.max_iters = 20;
    cfg.tol = 0.0;
    cfg.lipschitz = 2.0;
    for (auto _ : state) benchmark::DoNotOptimize(admm_reconstruct(ctx, cfg, yd));
    state.counters["iters"] = 20;
}
BENCHMARK(AdmmL1)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void ProxTV(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto w = noise(n, n, 5);
    for (auto _ : state) benchmark::DoNotOptimize(prox_tv(w, 0.1, 20));
}
BENCHMARK(ProxTV)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
