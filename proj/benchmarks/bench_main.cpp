#include <benchmark/benchmark.h>

#include "ldedq/environment.hpp"
#include "ldedq/oracle.hpp"
#include "ldedq/qlearn.hpp"
#include "ldedq/thermal.hpp"

using namespace ldedq;

namespace {

void BM_Temperature(benchmark::State& state) {
    const MaterialEnv env;
    LaserQuery q;
    q.power_w = 1000.0;
    q.speed_mps = mmpm_to_mps(400.0);
    q.t = 2.0;
    q.x = mmpm_to_mps(400.0) * 2.0;
    q.z = 0.5e-3;
    for (auto _ : state) benchmark::DoNotOptimize(temperature(env, q));
}
BENCHMARK(BM_Temperature);

void BM_MeltPoolDepth(benchmark::State& state) {
    const MaterialEnv env;
    const double v = mmpm_to_mps(static_cast<double>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(melt_pool_depth(env, 1000.0, v));
}
BENCHMARK(BM_MeltPoolDepth)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

// Cold cache: every state of the grid evaluated once, then ranked.
void BM_GridOracle(benchmark::State& state) {
    StateGrid g;
    g.n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        DepthCache cache(g, MaterialEnv{});
        benchmark::DoNotOptimize(brute_force_rank(cache, 1.0, 0.1));
    }
}
BENCHMARK(BM_GridOracle)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond)->Iterations(1);

// Training on a warm cache measures the learner alone.
void BM_Train(benchmark::State& state) {
    DepthCache cache(StateGrid{}, MaterialEnv{});
    cache.warm_up();
    const Environment env(cache, RewardConfig{});
    Hyperparams hp;
    hp.episodes = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(train(env, hp));
}
BENCHMARK(BM_Train)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
