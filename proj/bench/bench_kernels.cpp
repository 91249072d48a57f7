// Serial reference vs OpenMP path for the grid kernels.

#include <benchmark/benchmark.h>

#include "crossreg/kernels.hpp"
#include "crossreg/scenarios.hpp"
#include "crossreg/smoothing.hpp"

using namespace crossreg;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

const RegularizedField& spatial_field() {
  static const RegularizedField rf(smoothing_example(3), Mollifier::plateau(0.2));
  return rf;
}

void BM_generator_on_grid(benchmark::State& st) {
  const auto& rf = spatial_field();
  const auto chart = ChartMap::family(3, {1, 2, 3});
  const double lo[4] = {-0.9, -0.9, -0.9, 0.0}, hi[4] = {0.9, 0.9, 0.9, 0.9};
  const int counts[4] = {11, 11, 11, 11};
  const auto grid = tensor_grid(lo, hi, counts);
  for (auto _ : st) benchmark::DoNotOptimize(generator_on_grid(rf, chart, grid, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(grid.size() / 4));
}

void BM_regularized_moments(benchmark::State& st) {
  const auto& rf = spatial_field();
  const double lo[4] = {-0.5, -0.5, -0.5, 0.05}, hi[4] = {0.5, 0.5, 0.5, 0.3};
  const int counts[4] = {9, 9, 9, 4};
  const auto grid = tensor_grid(lo, hi, counts);
  for (auto _ : st) benchmark::DoNotOptimize(regularized_on_grid(rf, grid, false, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(grid.size() / 4));
}

void BM_regularized_quadrature(benchmark::State& st) {
  static const RegularizedField rf(smoothing_example(2), Mollifier::box());
  const double lo[3] = {-0.5, -0.5, 0.05}, hi[3] = {0.5, 0.5, 0.3};
  const int counts[3] = {6, 6, 2};
  const auto grid = tensor_grid(lo, hi, counts);
  for (auto _ : st) benchmark::DoNotOptimize(regularized_on_grid(rf, grid, true, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(grid.size() / 3));
}

void BM_smoothness_chart(benchmark::State& st) {
  RegularizedField rf(smoothing_example(2), Mollifier::plateau(0.2));
  const auto plan = smoothing_plan(rf.base().locus());
  SmoothOptions o;
  o.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(smoothness_report(rf, plan.atlas.front(), o));
}

}  // namespace

BENCHMARK(BM_generator_on_grid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_regularized_moments)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_regularized_quadrature)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_smoothness_chart)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
