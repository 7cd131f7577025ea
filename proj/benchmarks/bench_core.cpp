#include <benchmark/benchmark.h>

#include "pltower/entropy.hpp"
#include "pltower/gallery.hpp"
#include "pltower/metric.hpp"
#include "pltower/tower.hpp"

using namespace pltower;

static void BM_ComposeIterate(benchmark::State& state) {
    const PLMap f = make_tent(1.9);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(iterate(f, n));
}
BENCHMARK(BM_ComposeIterate)->Arg(8)->Arg(12)->Arg(16);

static void BM_Pullback(benchmark::State& state) {
    const PLMap f = make_asym_tent(0.3);
    PLMetric m = PLMetric::lebesgue();
    for (int i = 0; i < state.range(0); ++i) m = normalize(pullback(f, m));
    for (auto _ : state) benchmark::DoNotOptimize(pullback(f, m));
}
BENCHMARK(BM_Pullback)->Arg(4)->Arg(8)->Arg(12);

static void BM_ThetaStep(benchmark::State& state) {
    PLMap f = make_asym_tent(0.3);
    for (int i = 0; i < state.range(0); ++i) f = theta_step(f).f_next;
    for (auto _ : state) benchmark::DoNotOptimize(theta_step(f));
}
BENCHMARK(BM_ThetaStep)->Arg(4)->Arg(8)->Arg(12);

static void BM_Hofbauer(benchmark::State& state) {
    const PLMap f = make_tent(1.9);
    const int depth = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(hofbauer_entropy(hofbauer_build(f, depth)));
}
BENCHMARK(BM_Hofbauer)->Arg(20)->Arg(60);

static void BM_Kneading(benchmark::State& state) {
    const PLMap f = make_tent(1.9);
    const int terms = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kneading_entropy(kneading_sequence(f, terms)));
}
BENCHMARK(BM_Kneading)->Arg(100)->Arg(400);
BENCHMARK_MAIN();
