#include <benchmark/benchmark.h>

#include "arsar/csa.hpp"
#include "arsar/net/arsar_net.hpp"
#include "arsar/net/regularizer.hpp"
#include "arsar/sampling.hpp"
#include "arsar/sar_params.hpp"

using namespace arsar;
using namespace arsar::net;

namespace {

ComplexImage noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    ComplexImage a(rows, cols);
    for (auto& z : a.data()) z = rng.complex_normal();
    return a;
}

NetParams params_for(Variant v, std::size_t n) {
    NetConfig cfg;
    cfg.variant = v;
    cfg.height = cfg.width = n;
    return init_params(cfg, 2.0);
}

}  // namespace

// The swift pyramid should scale linearly in pixel count.
static void RegularizerSwift(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = params_for(Variant::swift, n);
    const auto x = noise(n, n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(regularizer_swift(p, 0, x));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(RegularizerSwift)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

static void RegularizerPro(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto p = params_for(Variant::pro, n);
    const auto x = noise(n, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(regularizer_pro(p, 0, x));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(RegularizerPro)->RangeMultiplier(2)->Range(32, 128)->Complexity(benchmark::oN)->Unit(benchmark::kMillisecond);

static void ForwardBackward(benchmark::State& state) {
    const std::size_t n = 32;
    const auto v = state.range(0) == 0 ? Variant::swift : Variant::pro;
    const Rng rng(3);
    const OperatorContext ctx(build_phase_plan(default_params(n, n)), make_sampling(Axis::range, n, 1.0, rng.split(1)),
                              make_sampling(Axis::azimuth, n, 0.5, rng.split(2)));
    auto p = params_for(v, n);
    const auto truth = noise(n, n, 4);
    const auto yd = observation_G(ctx, truth);
    for (auto _ : state) {
        auto pass = forward_batch(ctx, p, {yd}, ForwardMode{true, false});
        attach_nmpe(pass, {truth});
        benchmark::DoNotOptimize(backward(pass, 1.0));
    }
    state.SetLabel(v == Variant::swift ? "swift" : "pro");
}
BENCHMARK(ForwardBackward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
