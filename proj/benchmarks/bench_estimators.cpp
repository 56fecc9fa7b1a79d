#include <benchmark/benchmark.h>

#include <random>

#include "zovr/data_io.hpp"
#include "zovr/estimators.hpp"
#include "zovr/objectives.hpp"
#include "zovr/optimizers.hpp"

namespace {

std::unique_ptr<zovr::DifferentiableObjective> bench_objective(int n, int d) {
  std::mt19937_64 rng(1234);
  auto data = zovr::make_synthetic_logreg_data(rng, n, d, 2.0);
  return zovr::make_nonconvex_logreg(data, 0.1, d);
}

void BM_CoordEstimate(benchmark::State& state) {
  const int n = 200, d = static_cast<int>(state.range(0));
  auto obj = bench_objective(n, d);
  std::vector<int> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = i;
  zovr::Vec x(d, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zovr::coord_estimate(*obj, samples, x, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() * 2 * d * n);
}
BENCHMARK(BM_CoordEstimate)->Arg(10)->Arg(20)->Arg(50);

void BM_TwoPointEstimate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  auto obj = bench_objective(200, d);
  std::mt19937_64 rng(7);
  zovr::Vec x(d, 0.1);
  const zovr::Vec u = zovr::sample_unit_sphere(rng, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zovr::rand_two_point_estimate(*obj, 3, x, u, 1e-2));
  }
}
BENCHMARK(BM_TwoPointEstimate)->Arg(20)->Arg(100);

void BM_SpiderEpoch(benchmark::State& state) {
  const int n = 200, d = 20;
  auto obj = bench_objective(n, d);
  const double L = obj->metadata().smoothness_L.value();
  auto hp = zovr::select_params(zovr::Corollary::kCor3, n, d, 200, L);
  hp.seed = 9;
  zovr::RunOptions opts;
  opts.trace_stride = 1000;  // keep reporting cost out of the loop timing
  for (auto _ : state) {
    benchmark::DoNotOptimize(zovr::run_zo_spider_coord(*obj, hp, opts));
  }
}
BENCHMARK(BM_SpiderEpoch);

}  // namespace

BENCHMARK_MAIN();
