#include "pivotk/delay.hpp"
#include "pivotk/incentives.hpp"
#include "pivotk/mechanism.hpp"
#include "pivotk/probability.hpp"
#include "pivotk/simulator.hpp"
#include "pivotk/sweep.hpp"

#include <benchmark/benchmark.h>

using namespace pivotk;

static void BM_HypergeomTail(benchmark::State& state) {
  HypergeomLaw law(static_cast<std::uint64_t>(state.range(0)), static_cast<std::uint64_t>(state.range(0)) / 5, 20);
  for (auto _ : state) benchmark::DoNotOptimize(law.tail_ge(11));
}
BENCHMARK(BM_HypergeomTail)->Arg(100)->Arg(10000);

static void BM_ExactQ0(benchmark::State& state) {
  const auto inst = SystemInstance::from_kappa(100, 20, static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_q0(inst, 0.2));
}
BENCHMARK(BM_ExactQ0)->Arg(30)->Arg(100)->Arg(1000);

static void BM_SawtoothSweep(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(sawtooth_sweep(100, 20, 0.2, 1, 120));
}
BENCHMARK(BM_SawtoothSweep)->Unit(benchmark::kMillisecond);

static void BM_RunTrace(benchmark::State& state) {
  const auto inst = SystemInstance::from_kappa(100, 20, static_cast<std::uint32_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trace(inst, 0.2, policy::FullWithhold{}, seed++));
}
BENCHMARK(BM_RunTrace)->Arg(30)->Arg(100);

static void BM_PivotalAllocation(benchmark::State& state) {
  const auto kappa = static_cast<std::uint32_t>(state.range(0));
  std::vector<BundleRecord> records;
  for (std::uint32_t i = 0; i < kappa; ++i) records.push_back(make_record(1 + i / 20, 1 + i % 20, i + 1, Owner::honest));
  const auto ordered = resolve_order(records);
  const Rational budget = make_rational(1000, 7);
  for (auto _ : state) benchmark::DoNotOptimize(pivotal_allocation(ordered, kappa, 1, budget));
}
BENCHMARK(BM_PivotalAllocation)->Arg(30)->Arg(300);

static void BM_Knapsack(benchmark::State& state) {
  std::vector<AttackItem> items;
  for (int i = 0; i < state.range(0); ++i) items.push_back({1.0 + i % 7, 0.5 + 0.01 * (i % 13)});
  for (auto _ : state) benchmark::DoNotOptimize(knapsack_select(items, 10.0, 1e-3));
}
BENCHMARK(BM_Knapsack)->Arg(15)->Arg(200);

BENCHMARK_MAIN();
