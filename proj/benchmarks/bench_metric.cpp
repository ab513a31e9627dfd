#include <benchmark/benchmark.h>

#include "swarmcov/extrema.hpp"
#include "swarmcov/metric.hpp"
#include "swarmcov/pdf_bench.hpp"

using namespace swarmcov;

namespace {

struct Ring {
  RectDomain dom{0.0, 48.0, 0.0, 70.0};
  QuadratureGrid grid{dom, 100, 100};
  TargetDensity rho = TargetDensity::reference_ring().normalized(grid);
  ScaledKernel k{KernelShape::gaussian, 2.0};
};

void BM_ErrorMetric(benchmark::State& state)
{
  const Ring r;
  const SwarmConfig s = sample_positions(r.rho, static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(error_metric(s, r.rho, r.k, r.grid).e);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ErrorMetric)->Arg(50)->Arg(200)->Arg(800);

void BM_AnalyticGradient(benchmark::State& state)
{
  const Ring r;
  const ErrorObjective obj(r.rho, r.k, r.grid);
  const SwarmConfig s = sample_positions(r.rho, static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(obj.analytic(s).e);
}
BENCHMARK(BM_AnalyticGradient)->Arg(50)->Arg(200);

void BM_MonteCarloSamples(benchmark::State& state)
{
  const Ring r;
  for (auto _ : state)
    benchmark::DoNotOptimize(monte_carlo_samples(r.rho, r.k, r.grid, 200, 20, 3).values.data());
}
BENCHMARK(BM_MonteCarloSamples)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
