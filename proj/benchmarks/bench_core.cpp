#include <benchmark/benchmark.h>

#include "harqmac/capacity.hpp"
#include "harqmac/inr.hpp"
#include "harqmac/policies.hpp"
#include "harqmac/simulator.hpp"
#include "harqmac/special_math.hpp"

using namespace harqmac;

static void BM_ExpIntegral(benchmark::State& state) {
  double x = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_integral(x));
    x = x < 30.0 ? x * 1.1 : 1e-3;
  }
}
BENCHMARK(BM_ExpIntegral);

static void BM_EwfcCapacity(benchmark::State& state) {
  const int users = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ewfc_capacity(users, 1.0).capacity);
}
BENCHMARK(BM_EwfcCapacity)->Arg(1)->Arg(2)->Arg(3);

static void BM_OptimizeMultilevel(benchmark::State& state) {
  const int levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(multilevel_cdtdma(2, 1.0, levels).throughput);
}
BENCHMARK(BM_OptimizeMultilevel)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_OptimizeJointPlusTdma(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(joint_plus_tdma(1.0).throughput);
}
BENCHMARK(BM_OptimizeJointPlusTdma)->Unit(benchmark::kMillisecond);

static void BM_SimulateSlots(benchmark::State& state) {
  const ThroughputPoint pt = multilevel_cdtdma(2, 1.0, 3);
  const SystemSpec spec = make_system_spec(pt.params, 2, 1.0);
  const std::int64_t slots = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec, pt.params, slots, 1).throughput_est);
  state.SetItemsProcessed(state.iterations() * slots);
}
BENCHMARK(BM_SimulateSlots)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_OptimizeInr(benchmark::State& state) {
  InrOptions options;
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_inr_levels(2, 3, 2.0, GainDistribution{2}, options).rate);
  }
}
BENCHMARK(BM_OptimizeInr)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
