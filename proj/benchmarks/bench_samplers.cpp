#include <benchmark/benchmark.h>

#include "denguecast/stats.hpp"

using namespace denguecast::stats;

static void BM_Gamma(benchmark::State& state) {
  Rng rng(1);
  const double shape = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_gamma(rng, shape, 1.0));
}
BENCHMARK(BM_Gamma)->Arg(1)->Arg(100)->Arg(5000);

static void BM_Poisson(benchmark::State& state) {
  Rng rng(2);
  const auto mean = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(rng, mean));
}
BENCHMARK(BM_Poisson)->Arg(3)->Arg(300)->Arg(300000);

static void BM_Binomial(benchmark::State& state) {
  Rng rng(3);
  const auto n = static_cast<denguecast::Count>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_binomial(rng, n, 0.3));
}
BENCHMARK(BM_Binomial)->Arg(10)->Arg(1000)->Arg(100000);

static void BM_TruncatedGamma(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(sample_truncated_gamma_unit(rng, 40.0, 600.0));
}
BENCHMARK(BM_TruncatedGamma);
