// Serial reference path vs OpenMP path for the two hot kernels.
// Run with OMP_NUM_THREADS set; on a single core the two should be within noise.
#include <benchmark/benchmark.h>

#include "pcornet/ggm.hpp"
#include "pcornet/netgen.hpp"
#include "pcornet/parallel.hpp"

using namespace pcornet;

namespace {

ExpressionMatrix bench_data(Index n, Index p) {
  return sample_data(simulate_pcor_density(p, 0.05, 1), n, 2);
}

Execution execution_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_ShrinkageSums(benchmark::State& state) {
  const MatrixXd xs = standardize_columns(bench_data(100, state.range(1))).values;
  const Execution exec = execution_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(shrinkage_sums(xs, exec));
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}

void BM_PerGene(benchmark::State& state, Method method) {
  const auto x = bench_data(50, state.range(1));
  EstimateOptions opt;
  opt.seed = 3;
  opt.execution = execution_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_network(x, method, opt));
  state.SetLabel(opt.execution == Execution::serial ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_ShrinkageSums)->ArgsProduct({{0, 1}, {100, 400}})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PerGene, ridge, Method::ridge)->ArgsProduct({{0, 1}, {40}})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PerGene, lasso, Method::lasso)->ArgsProduct({{0, 1}, {40}})->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PerGene, pls, Method::pls)->ArgsProduct({{0, 1}, {40}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
