#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "denguecast/forecast.hpp"

using namespace denguecast;
using namespace denguecast::forecast;

namespace {

const Date kStart = std::chrono::sys_days{std::chrono::year{2010} / std::chrono::January / 3};

mcmc::PosteriorSamples samples_from(std::vector<model::ModelParams> params, double log_pi_end) {
  mcmc::PosteriorSamples s;
  s.weeks = 1;
  s.n_chains = 1;
  long it = 0;
  for (const auto& p : params) s.draws.push_back(mcmc::Draw{0, ++it, p, model::LatentPath{{log_pi_end}}});
  return s;
}

// One window whose weeks carry the given bands and predictions directly.
WindowScore window_of(int model_mistakes, int baseline_mistakes, double model_err, double baseline_err) {
  const int n = std::max(model_mistakes, baseline_mistakes) + 1;
  WindowScore w;
  for (int i = 0; i < n; ++i) {
    ScoredWeek wk;
    wk.actual = 10;
    wk.actual_band = IncidenceBand::Low;
    wk.model_band = i < model_mistakes ? IncidenceBand::High : IncidenceBand::Low;
    wk.baseline_band = i < baseline_mistakes ? IncidenceBand::Medium : IncidenceBand::Low;
    wk.model_pred = 10.0 + (i == 0 ? model_err : 0.0);
    wk.baseline_pred = 10.0 + (i == 0 ? baseline_err : 0.0);
    w.weeks.push_back(wk);
  }
  return w;
}

CityScore city_of(const std::string& id, int m, int b, double me, double be) {
  return CityScore{CityId{id}, {window_of(m, b, me, be)}};
}

}  // namespace

TEST(SlidingWindows, Counts) {
  EXPECT_EQ(sliding_windows(156).size(), 144u);
  auto one = sliding_windows(13);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].first_predicted(), 13);
  EXPECT_EQ(one[0].horizon, 1);
  auto four = sliding_windows(16);
  ASSERT_EQ(four.size(), 4u);
  EXPECT_EQ(four[0], (WindowSpec{1, 12, 4}));
  EXPECT_EQ(four[3], (WindowSpec{4, 12, 1}));
  EXPECT_TRUE(sliding_windows(12).empty());
  EXPECT_TRUE(sliding_windows(3).empty());
}

TEST(SlidingWindows, CountIsWeeksMinusFitLength) {
  for (int t = 13; t < 300; ++t) {
    auto w = sliding_windows(t);
    ASSERT_EQ(static_cast<int>(w.size()), t - 12);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_EQ(w[i].fit_start, static_cast<int>(i) + 1);
      EXPECT_GE(w[i].horizon, 1);
      EXPECT_LE(w[i].horizon, 4);
      EXPECT_LE(w[i].first_predicted() + w[i].horizon - 1, t);
    }
  }
}

TEST(WeighParticles, HandComputed) {
  std::vector<Particle> ps{{1.0, 0.5, 1.0, 0.0}, {2.0, 0.1, 1.0, std::log(3.0)}, {0.5, 0.9, 1.0, std::log(0.5)}};
  const double exposure = 2.0;
  const Count x = 4;
  std::vector<double> w(3);
  WeekForecast f = weigh_particles(ps, x, exposure, 0.9, w);
  double num = 0.0;
  double den = 0.0;
  std::vector<double> raw;
  for (const auto& p : ps) {
    const double mu = exposure * std::exp(p.log_pi);
    const double nu = p.lambda + p.alpha * mu;
    const double lik = std::pow(nu, 4.0) * std::exp(-nu);
    raw.push_back(lik);
    num += lik * mu;
    den += lik;
  }
  EXPECT_NEAR(f.mean, num / den, 1e-10);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(w[i], raw[i] / den, 1e-12);
  double sq = 0.0;
  for (double r : raw) sq += (r / den) * (r / den);
  EXPECT_NEAR(f.weight_ess, 1.0 / sq, 1e-9);
}

TEST(PredictiveFilter, ZeroAlphaIgnoresTweets) {
  std::vector<model::ModelParams> params;
  for (int i = 0; i < 50; ++i) params.push_back({1.5, 0.0, 5.0 + i});
  auto s = samples_from(params, std::log(20.0));
  std::vector<Count> quiet{0, 1, 0, 2};
  std::vector<Count> loud{400, 900, 10000, 7};
  FilterConfig cfg;
  stats::Rng r1(5);
  stats::Rng r2(5);
  FilterResult a = predictive_filter(s, quiet, 3.0, cfg, r1);
  FilterResult b = predictive_filter(s, loud, 3.0, cfg, r2);
  ASSERT_EQ(a.weeks.size(), 4u);
  for (std::size_t h = 0; h < 4; ++h) {
    EXPECT_EQ(a.weeks[h].mean, b.weeks[h].mean);
    EXPECT_GE(a.weeks[h].mean, 0.0);
  }
}

TEST(PredictiveFilter, ZeroAlphaMatchesPushForwardMean) {
  // With uniform weights the predictive mean is c * E[exp(log pi + shock)],
  // i.e. c * exp(l0 + 1/(2 tau)) averaged over draws.
  std::vector<model::ModelParams> params{{1.0, 0.0, 4.0}, {1.0, 0.0, 10.0}};
  auto s = samples_from(params, std::log(30.0));
  FilterConfig cfg;
  cfg.replicates = 100000;
  stats::Rng rng(6);
  std::vector<Count> x{5};
  FilterResult r = predictive_filter(s, x, 2.0, cfg, rng);
  const double expected = 2.0 * 30.0 * 0.5 * (std::exp(1.0 / 8.0) + std::exp(1.0 / 20.0));
  EXPECT_NEAR(r.weeks[0].mean, expected, 0.01 * expected);
}

TEST(PredictiveFilter, FrozenPathKeepsFitEndLevel) {
  std::vector<model::ModelParams> params(200, model::ModelParams{1.0, 0.9, 1e12});
  auto s = samples_from(params, std::log(40.0));
  stats::Rng rng(7);
  std::vector<Count> huge{100000, 100000};
  FilterResult r = predictive_filter(s, huge, 5.0, FilterConfig{}, rng);
  for (const auto& w : r.weeks) EXPECT_NEAR(w.mean, 200.0, 1e-3);
}

TEST(PredictiveFilter, Errors) {
  stats::Rng rng(8);
  mcmc::PosteriorSamples empty;
  std::vector<Count> x{1};
  EXPECT_THROW(predictive_filter(empty, x, 1.0, FilterConfig{}, rng), std::invalid_argument);
  auto s = samples_from({{1, 0.1, 1}}, 0.0);
  EXPECT_THROW(predictive_filter(s, {}, 1.0, FilterConfig{}, rng), std::invalid_argument);
}

TEST(Baseline, Examples) {
  std::vector<Count> c1{0, 1, 2};
  std::vector<Count> t1{0, 1, 2};
  std::vector<Count> f1{5};
  BaselineForecast b1 = baseline_forecast(c1, t1, f1);
  EXPECT_FALSE(b1.failed);
  EXPECT_NEAR(b1.pred[0], 5.0, 1e-12);
  std::vector<Count> c2{1, 3, 5};
  std::vector<Count> f2{3};
  EXPECT_NEAR(baseline_forecast(c2, t1, f2).pred[0], 7.0, 1e-12);
  std::vector<Count> flat{4, 4, 4};
  EXPECT_TRUE(baseline_forecast(c2, flat, f2).failed);
  // Negative extrapolation is clamped at zero.
  std::vector<Count> down{10, 5, 0};
  std::vector<Count> f3{9};
  EXPECT_DOUBLE_EQ(baseline_forecast(down, t1, f3).pred[0], 0.0);
}

TEST(ScoreBands, Examples) {
  std::vector<double> same{3.0, 150.0, 400.0};
  std::vector<Count> actual{3, 150, 400};
  EXPECT_EQ(score_bands(same, actual, 100000), 0);
  std::vector<double> p{99.0};
  std::vector<Count> a{101};
  EXPECT_EQ(score_bands(p, a, 100000), 1);
  // Rates at pop 2e5: pred 50, 150, 150, 350; actual 40, 150, 80.5, 290.
  std::vector<double> p4{100.0, 299.5, 300.0, 700.0};
  std::vector<Count> a4{80, 300, 161, 580};
  EXPECT_EQ(score_bands(p4, a4, 200000), 2);
}

TEST(ScoreBands, PermutationEquivariantAndBounded) {
  stats::Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> p(4);
    std::vector<Count> a(4);
    for (int i = 0; i < 4; ++i) {
      p[i] = 600.0 * rng.uniform();
      a[i] = static_cast<Count>(600.0 * rng.uniform());
    }
    const int base = score_bands(p, a, 150000);
    EXPECT_GE(base, 0);
    EXPECT_LE(base, 4);
    std::vector<int> idx{0, 1, 2, 3};
    std::reverse(idx.begin(), idx.end());
    std::rotate(idx.begin(), idx.begin() + rep % 4, idx.end());
    std::vector<double> pp;
    std::vector<Count> aa;
    for (int i : idx) {
      pp.push_back(p[i]);
      aa.push_back(a[i]);
    }
    EXPECT_EQ(score_bands(pp, aa, 150000), base);
  }
}

TEST(ScoreWindow, RoundsBeforeBanding) {
  WindowResult r;
  r.window = WindowSpec{1, 12, 2};
  r.actual = {100, 99};
  r.model_pred = {99.5, 99.49};
  r.baseline_pred = {-3.0, 100.0};
  WindowScore s = score_window(r, 100000);
  EXPECT_EQ(s.weeks[0].model_band, IncidenceBand::Medium);
  EXPECT_EQ(s.weeks[1].model_band, IncidenceBand::Low);
  EXPECT_EQ(s.weeks[0].baseline_band, IncidenceBand::Low);
  EXPECT_EQ(s.weeks[1].baseline_band, IncidenceBand::Medium);
  EXPECT_EQ(s.weeks[0].actual_band, IncidenceBand::Medium);
}

TEST(CompareCities, Examples) {
  std::vector<CityScore> cities{city_of("a", 3, 5, 0, 0), city_of("b", 2, 2, 10.0, 12.5),
                                city_of("c", 2, 2, 12.5, 10.0), city_of("d", 4, 1, 0, 0),
                                city_of("e", 1, 1, 3.0, 3.0)};
  Comparison c = compare_cities(cities);
  EXPECT_EQ(c.cities[0].verdict, Verdict::Win);
  EXPECT_EQ(c.cities[1].verdict, Verdict::TieBrokenWin);
  EXPECT_EQ(c.cities[2].verdict, Verdict::TieBrokenLoss);
  EXPECT_EQ(c.cities[3].verdict, Verdict::Loss);
  EXPECT_EQ(c.cities[4].verdict, Verdict::TieBrokenLoss);
  EXPECT_EQ(c.cities[0].model_band_mistakes, 3);
  EXPECT_EQ(c.cities[0].baseline_band_mistakes, 5);
  EXPECT_NEAR(c.cities[1].model_abs_error, 10.0, 1e-12);
  EXPECT_NEAR(c.cities[1].baseline_abs_error, 12.5, 1e-12);
  EXPECT_EQ(c.summary.wins, 1);
  EXPECT_EQ(c.summary.ties, 3);
  EXPECT_EQ(c.summary.tie_broken_wins, 1);
  EXPECT_EQ(c.summary.losses, 1);
}

TEST(CompareCities, FailedWindowsExclude) {
  CityScore failed = city_of("f", 0, 3, 0, 0);
  failed.windows.push_back(window_of(0, 0, 0, 0));
  failed.windows.back().baseline_failed = true;
  std::vector<CityScore> cities{failed, city_of("g", 0, 1, 0, 0)};
  Comparison c = compare_cities(cities);
  EXPECT_EQ(c.cities[0].verdict, Verdict::Excluded);
  EXPECT_EQ(c.summary.excluded, 1);
  EXPECT_EQ(c.summary.compared(), 1);
}

TEST(CompareCities, ReportedTally) {
  std::vector<CityScore> cities;
  for (int i = 0; i < 35; ++i) cities.push_back(city_of("w" + std::to_string(i), 1, 3, 0, 0));
  for (int i = 0; i < 19; ++i) cities.push_back(city_of("tw" + std::to_string(i), 2, 2, 1.0, 2.0));
  for (int i = 0; i < 10; ++i) cities.push_back(city_of("tl" + std::to_string(i), 2, 2, 2.0, 1.0));
  for (int i = 0; i < 25; ++i) cities.push_back(city_of("l" + std::to_string(i), 3, 1, 0, 0));
  Comparison c = compare_cities(cities);
  EXPECT_EQ(c.summary.wins, 35);
  EXPECT_EQ(c.summary.ties, 29);
  EXPECT_EQ(c.summary.tie_broken_wins, 19);
  EXPECT_EQ(c.summary.losses, 25);
  EXPECT_NEAR(c.summary.best_share(), 54.0 / 89.0, 1e-12);
  EXPECT_NEAR(c.summary.best_share(), 0.606, 0.001);
}

TEST(CompareCities, AntisymmetricUnderSwap) {
  stats::Rng rng(10);
  std::vector<CityScore> cities;
  for (int i = 0; i < 100; ++i) {
    int m = static_cast<int>(rng.uniform() * 4);
    int b = static_cast<int>(rng.uniform() * 4);
    cities.push_back(city_of("c" + std::to_string(i), m, b, 1.0 + rng.uniform(), 1.0 + rng.uniform()));
  }
  std::vector<CityScore> swapped;
  for (const auto& c : cities) swapped.push_back(swap_methods(c));
  Comparison a = compare_cities(cities);
  Comparison b = compare_cities(swapped);
  auto mirror = [](Verdict v) {
    switch (v) {
      case Verdict::Win:
        return Verdict::Loss;
      case Verdict::Loss:
        return Verdict::Win;
      case Verdict::TieBrokenWin:
        return Verdict::TieBrokenLoss;
      case Verdict::TieBrokenLoss:
        return Verdict::TieBrokenWin;
      default:
        return v;
    }
  };
  for (std::size_t i = 0; i < cities.size(); ++i) EXPECT_EQ(b.cities[i].verdict, mirror(a.cities[i].verdict));
  EXPECT_EQ(a.summary.wins, b.summary.losses);
  EXPECT_EQ(a.summary.ties, b.summary.ties);
}

TEST(VerdictNames, Strings) {
  EXPECT_EQ(to_string(Verdict::TieBrokenWin), "tie_broken_win");
  EXPECT_EQ(to_string(Verdict::Excluded), "excluded");
}

namespace {

WeeklySeries simulated_city(std::uint64_t seed, std::size_t weeks) {
  stats::Rng rng(seed);
  model::Priors pr;
  pr.init_logpi_mean = std::log(100.0);
  pr.init_logpi_sd = 0.5;
  return model::simulate({3, 0.05, 25}, pr, CityId{"sim" + std::to_string(seed)}, 1'000'000, weeks, kStart, rng)
      .series;
}

ExperimentConfig quick_config(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.seed = seed;
  cfg.chain.n_iters = 3000;
  cfg.chain.burn_in = 1000;
  cfg.chain.thin = 10;
  cfg.workers = 1;
  return cfg;
}

}  // namespace

TEST(RunExperiment, MinimalSeriesHasOneWindow) {
  auto results = run_experiment(simulated_city(1, 13), model::Priors{}, quick_config(1));
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].window.first_predicted(), 13);
  EXPECT_EQ(results[0].actual.size(), 1u);
  EXPECT_EQ(results[0].model_pred.size(), 1u);
  EXPECT_EQ(results[0].baseline_pred.size(), 1u);
}

TEST(RunExperiment, FinitePredictionsAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto results = run_experiment(simulated_city(100 + seed, 18), model::Priors{}, quick_config(seed));
    ASSERT_EQ(results.size(), 6u);
    for (const auto& r : results) {
      ASSERT_FALSE(r.model_failed);
      ASSERT_EQ(r.model_pred.size(), static_cast<std::size_t>(r.window.horizon));
      for (double v : r.model_pred) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
      }
    }
  }
}

TEST(RunExperiment, DeterministicAndWorkerIndependent) {
  WeeklySeries s = simulated_city(3, 17);
  ExperimentConfig cfg = quick_config(9);
  auto a = run_experiment(s, model::Priors{}, cfg);
  cfg.workers = 3;
  auto b = run_experiment(s, model::Priors{}, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].model_pred, b[i].model_pred);
    EXPECT_EQ(a[i].baseline_pred, b[i].baseline_pred);
    EXPECT_EQ(a[i].window, b[i].window);
  }
}

TEST(RunExperiment, AllZeroFitStillReportsWindow) {
  WeeklySeries s(CityId{"zero"}, 100000, kStart, std::vector<Count>(14, 0), std::vector<Count>(14, 0));
  auto results = run_experiment(s, model::Priors{}, quick_config(2));
  ASSERT_EQ(results.size(), 2u);
  for (const auto& r : results) EXPECT_TRUE(r.baseline_failed);
}
