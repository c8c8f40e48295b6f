#include <benchmark/benchmark.h>

#include "gnnrisk/graph.hpp"
#include "gnnrisk/learners.hpp"
#include "gnnrisk/rng.hpp"
#include "gnnrisk/spectral.hpp"
#include "gnnrisk/synthesis.hpp"

using namespace gnnrisk;

static Matrix symmetric(Eigen::Index d) {
  Rng rng(1);
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.normal();
  }
  return 0.5 * (a + a.transpose());
}

static void BM_Jacobi(benchmark::State& state) {
  const Matrix a = symmetric(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigh_symmetric(a));
}
BENCHMARK(BM_Jacobi)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Sgd(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto ds = sample_from_spectrum(synthetic_spectrum(d, 1.0), 4096, 1.0, 2);
  const auto gt = make_ground_truth(ds.spectral, Alignment::head(1));
  const Vector y = generate_responses(ds, gt, 3);
  const SgdConfig cfg{0.5 / ds.covariance_trace(), 2048};
  for (auto _ : state) benchmark::DoNotOptimize(sgd_tail_averaged(ds, y, cfg));
}
BENCHMARK(BM_Sgd)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_Ridge(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto ds = sample_from_spectrum(synthetic_spectrum(d, 1.0), 1024, 1.0, 4, false);
  const auto gt = make_ground_truth(ds.spectral, Alignment::head(1));
  const Vector y = generate_responses(ds, gt, 5);
  for (auto _ : state) benchmark::DoNotOptimize(ridge_fit(ds, y, RidgeConfig{1.0}));
}
BENCHMARK(BM_Ridge)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_BarabasiAlbert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_ba(n, 3, seed++));
}
BENCHMARK(BM_BarabasiAlbert)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
