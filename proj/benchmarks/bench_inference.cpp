#include <benchmark/benchmark.h>

#include <chrono>
#include <cmath>

#include "denguecast/forecast.hpp"
#include "denguecast/mcmc.hpp"

using namespace denguecast;

namespace {

WeeklySeries city(std::size_t weeks) {
  stats::Rng rng(11);
  model::Priors pr;
  pr.init_logpi_mean = std::log(100.0);
  pr.init_logpi_sd = 0.5;
  const Date start = std::chrono::sys_days{std::chrono::year{2010} / std::chrono::January / 3};
  return model::simulate({3, 0.05, 25}, pr, CityId{"bench"}, 1'000'000, weeks, start, rng).series;
}

}  // namespace

static void BM_Sweep(benchmark::State& state) {
  WeeklySeries s = city(static_cast<std::size_t>(state.range(0)));
  model::Priors pr;
  mcmc::Sampler sampler(pr, s.size(), 0.5);
  mcmc::ChainState st = mcmc::initial_state(s);
  stats::Rng rng(5);
  for (auto _ : state) sampler.sweep(st, s, rng);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(12)->Arg(156);

static void BM_DeskWindowFit(benchmark::State& state) {
  WeeklySeries s = city(12);
  mcmc::ChainConfig cfg = mcmc::ChainConfig::desk();
  for (auto _ : state) benchmark::DoNotOptimize(mcmc::run_chain(s, model::Priors{}, cfg));
}
BENCHMARK(BM_DeskWindowFit)->Unit(benchmark::kMillisecond);

static void BM_PredictiveFilter(benchmark::State& state) {
  WeeklySeries s = city(16);
  mcmc::ChainResult fit = mcmc::run_chain(s.slice(0, 12), model::Priors{}, mcmc::ChainConfig::desk());
  auto future = s.tweets().subspan(12, 4);
  stats::Rng rng(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forecast::predictive_filter(fit.samples, future, s.exposure_scale(), {}, rng));
  }
}
BENCHMARK(BM_PredictiveFilter)->Unit(benchmark::kMillisecond);
