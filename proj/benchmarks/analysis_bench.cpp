#include <benchmark/benchmark.h>

#include "prefsel/analysis.hpp"
#include "support/case_study.hpp"

namespace {

using namespace prefsel;

void BM_EnumerateSupports(benchmark::State& state) {
  const auto table = testing::supplier_table();
  const auto st = testing::supplier_statements();
  SolveParams params;
  params.gamma = static_cast<int>(state.range(0));
  EnumerationOptions options;
  options.compute_phi = false;
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_streamlined_supports(table, st, params, options).family);
}
BENCHMARK(BM_EnumerateSupports)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_BruteForceSupports(benchmark::State& state) {
  const auto table = testing::supplier_table();
  const auto st = testing::supplier_statements();
  SolveParams params;
  params.gamma = 5;
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_supports(table, st, params, threads).family);
}
BENCHMARK(BM_BruteForceSupports)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
