#include "denguecast/forecast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace denguecast::forecast {

namespace {

double weighted_quantile(std::span<const std::pair<double, double>> sorted_value_weight, double q) {
  double cum = 0.0;
  for (const auto& [value, weight] : sorted_value_weight) {
    cum += weight;
    if (cum >= q) return value;
  }
  return sorted_value_weight.back().first;
}

void resample(std::vector<Particle>& particles, std::span<const double> weights, stats::Rng& rng) {
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  const double total = cumulative.back();
  std::vector<Particle> next(particles.size());
  for (auto& p : next) {
    double u = rng.uniform() * total;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), particles.size() - 1);
    p = particles[idx];
  }
  particles = std::move(next);
}

}  // namespace

std::vector<WindowSpec> sliding_windows(int weeks, int fit_len, int horizon) {
  if (fit_len < 1 || horizon < 1) throw std::invalid_argument("sliding_windows: fit_len and horizon must be >= 1");
  std::vector<WindowSpec> out;
  for (int start = 1; start + fit_len <= weeks; ++start) {
    int first = start + fit_len;
    int last = std::min(first + horizon - 1, weeks);
    out.push_back(WindowSpec{start, fit_len, last - first + 1});
  }
  return out;
}

WeekForecast weigh_particles(std::span<const Particle> particles, Count tweets, double exposure, double interval,
                             std::span<double> weights) {
  if (particles.empty() || weights.size() != particles.size()) {
    throw std::invalid_argument("weigh_particles: need one weight slot per particle");
  }
  const double xt = static_cast<double>(tweets);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const auto& p = particles[i];
    double nu = p.lambda + p.alpha * exposure * std::exp(model::clamp_log_pi(p.log_pi));
    double lw = (tweets == 0 ? 0.0 : xt * std::log(nu)) - nu;
    if (std::isnan(lw)) lw = -std::numeric_limits<double>::infinity();
    weights[i] = lw;
    max_lw = std::max(max_lw, lw);
  }
  WeekForecast out;
  if (!std::isfinite(max_lw)) {
    // No particle can explain the tweet count; fall back to equal weights.
    std::ranges::fill(weights, 1.0);
    max_lw = 0.0;
  } else {
    for (double& w : weights) w = std::exp(w - max_lw);
  }
  double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::pair<double, double>> value_weight(particles.size());
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    weights[i] /= total;
    double mu = exposure * std::exp(model::clamp_log_pi(particles[i].log_pi));
    out.mean += weights[i] * mu;
    sum_sq += weights[i] * weights[i];
    value_weight[i] = {mu, weights[i]};
  }
  out.weight_ess = 1.0 / sum_sq;
  std::ranges::sort(value_weight);
  const double tail = 0.5 * (1.0 - interval);
  out.lower = weighted_quantile(value_weight, tail);
  out.upper = weighted_quantile(value_weight, 1.0 - tail);
  return out;
}

FilterResult predictive_filter(const mcmc::PosteriorSamples& samples, std::span<const Count> future_tweets,
                               double exposure, const FilterConfig& config, stats::Rng& rng) {
  if (samples.draws.empty()) throw std::invalid_argument("predictive_filter: no posterior draws");
  if (future_tweets.empty()) throw std::invalid_argument("predictive_filter: empty horizon");
  if (config.replicates < 1) throw std::invalid_argument("predictive_filter: replicates must be >= 1");

  std::vector<Particle> particles;
  particles.reserve(samples.draws.size() * static_cast<std::size_t>(config.replicates));
  for (const auto& d : samples.draws) {
    Particle p{d.params.lambda, d.params.alpha, d.params.tau, d.path.log_pi.back()};
    for (int k = 0; k < config.replicates; ++k) particles.push_back(p);
  }

  FilterResult result;
  std::vector<double> weights(particles.size());
  const double ess_floor = config.degeneracy_fraction * static_cast<double>(particles.size());
  for (std::size_t h = 0; h < future_tweets.size(); ++h) {
    for (auto& p : particles) p.log_pi += stats::sample_normal(rng, 0.0, 1.0 / std::sqrt(p.tau));
    WeekForecast week = weigh_particles(particles, future_tweets[h], exposure, config.interval, weights);
    if (week.weight_ess < ess_floor) result.degenerate = true;
    result.weeks.push_back(week);
    if (h + 1 < future_tweets.size()) resample(particles, weights, rng);
  }
  return result;
}

BaselineForecast baseline_forecast(std::span<const Count> fit_cases, std::span<const Count> fit_tweets,
                                   std::span<const Count> future_tweets) {
  if (fit_cases.size() != fit_tweets.size() || fit_cases.size() < 2) {
    throw std::invalid_argument("baseline_forecast: need >= 2 paired fit weeks");
  }
  std::vector<double> x(fit_tweets.begin(), fit_tweets.end());
  std::vector<double> y(fit_cases.begin(), fit_cases.end());
  stats::LinearFit fit = stats::ols_fit(x, y);
  BaselineForecast out;
  out.failed = fit.degenerate;
  for (Count xt : future_tweets) {
    out.pred.push_back(std::max(0.0, stats::ols_predict(fit, static_cast<double>(xt))));
  }
  return out;
}

int score_bands(std::span<const double> pred, std::span<const Count> actual, Count population) {
  if (pred.size() != actual.size()) throw std::invalid_argument("score_bands: length mismatch");
  int mistakes = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    Count rounded = static_cast<Count>(std::llround(std::max(0.0, pred[i])));
    if (band(incidence_rate(rounded, population)) != band(incidence_rate(actual[i], population))) ++mistakes;
  }
  return mistakes;
}

std::vector<WindowResult> run_experiment(const WeeklySeries& series, const model::Priors& priors,
                                         const ExperimentConfig& config) {
  const auto windows = sliding_windows(static_cast<int>(series.size()), config.fit_len, config.horizon);
  std::vector<WindowResult> results(windows.size());
  const std::uint64_t city_key = stats::hash_string(series.city().value);
  const double exposure = series.exposure_scale();

  auto run_window = [&](std::size_t i) {
    const WindowSpec& w = windows[i];
    WindowResult r;
    r.window = w;
    const auto fit_first = static_cast<std::size_t>(w.fit_start - 1);
    const auto fit_len = static_cast<std::size_t>(w.fit_len);
    const auto pred_first = fit_first + fit_len;
    const auto horizon = static_cast<std::size_t>(w.horizon);
    auto future_tweets = series.tweets().subspan(pred_first, horizon);
    auto actual = series.cases().subspan(pred_first, horizon);
    r.actual.assign(actual.begin(), actual.end());

    WeeklySeries fit = series.slice(fit_first, fit_len);
    mcmc::ChainConfig chain = config.chain;
    chain.seed = stats::derive_seed(config.seed, {city_key, static_cast<std::uint64_t>(i), 1});
    mcmc::ChainResult posterior = mcmc::run_chain(fit, priors, chain);
    r.model_converged = posterior.diagnostics.converged();
    if (posterior.failed()) {
      r.model_failed = true;
    } else {
      stats::Rng rng(stats::derive_seed(config.seed, {city_key, static_cast<std::uint64_t>(i), 2}));
      FilterResult filtered = predictive_filter(posterior.samples, future_tweets, exposure, config.filter, rng);
      r.filter_degenerate = filtered.degenerate;
      for (const auto& wk : filtered.weeks) r.model_pred.push_back(wk.mean);
      r.model_failed = !std::ranges::all_of(r.model_pred, [](double v) { return std::isfinite(v); });
      if (r.model_failed) r.model_pred.clear();
    }

    BaselineForecast base = baseline_forecast(fit.cases(), fit.tweets(), future_tweets);
    r.baseline_pred = std::move(base.pred);
    r.baseline_failed = base.failed;
    results[i] = std::move(r);
  };

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, windows.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < windows.size(); ++i) run_window(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < workers; ++k) {
      pool.emplace_back([&, k] {
        try {
          for (std::size_t i = next++; i < windows.size(); i = next++) run_window(i);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

WindowScore score_window(const WindowResult& result, Count population) {
  WindowScore score;
  score.model_failed = result.model_failed;
  score.baseline_failed = result.baseline_failed;
  for (std::size_t i = 0; i < result.actual.size(); ++i) {
    ScoredWeek w;
    w.actual = result.actual[i];
    w.actual_band = band(incidence_rate(w.actual, population));
    if (i < result.model_pred.size()) {
      w.model_pred = result.model_pred[i];
      w.model_band = band(incidence_rate(std::llround(std::max(0.0, w.model_pred)), population));
    }
    if (i < result.baseline_pred.size()) {
      w.baseline_pred = result.baseline_pred[i];
      w.baseline_band = band(incidence_rate(std::llround(std::max(0.0, w.baseline_pred)), population));
    }
    score.weeks.push_back(w);
  }
  return score;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Win:
      return "win";
    case Verdict::TieBrokenWin:
      return "tie_broken_win";
    case Verdict::TieBrokenLoss:
      return "tie_broken_loss";
    case Verdict::Loss:
      return "loss";
    case Verdict::Excluded:
      return "excluded";
  }
  return "excluded";
}

double ComparisonSummary::as_good_share() const noexcept {
  return compared() ? static_cast<double>(wins + ties) / compared() : 0.0;
}

double ComparisonSummary::best_share() const noexcept {
  return compared() ? static_cast<double>(wins + tie_broken_wins) / compared() : 0.0;
}

Comparison compare_cities(std::span<const CityScore> cities) {
  Comparison out;
  for (const auto& city : cities) {
    CityComparison c;
    c.city = city.city;
    bool failed = false;
    for (const auto& w : city.windows) {
      failed = failed || w.model_failed || w.baseline_failed;
      for (const auto& wk : w.weeks) {
        const double actual = static_cast<double>(wk.actual);
        if (!w.model_failed) {
          c.model_band_mistakes += wk.model_band != wk.actual_band;
          c.model_abs_error += std::fabs(wk.model_pred - actual);
        }
        if (!w.baseline_failed) {
          c.baseline_band_mistakes += wk.baseline_band != wk.actual_band;
          c.baseline_abs_error += std::fabs(wk.baseline_pred - actual);
        }
      }
    }
    auto& s = out.summary;
    if (failed) {
      c.verdict = Verdict::Excluded;
      ++s.excluded;
    } else if (c.model_band_mistakes < c.baseline_band_mistakes) {
      c.verdict = Verdict::Win;
      ++s.wins;
    } else if (c.model_band_mistakes > c.baseline_band_mistakes) {
      c.verdict = Verdict::Loss;
      ++s.losses;
    } else {
      ++s.ties;
      if (c.model_abs_error < c.baseline_abs_error) {
        c.verdict = Verdict::TieBrokenWin;
        ++s.tie_broken_wins;
      } else {
        c.verdict = Verdict::TieBrokenLoss;
      }
    }
    out.cities.push_back(std::move(c));
  }
  return out;
}

CityScore swap_methods(const CityScore& city) {
  CityScore out = city;
  for (auto& w : out.windows) {
    std::swap(w.model_failed, w.baseline_failed);
    for (auto& wk : w.weeks) {
      std::swap(wk.model_pred, wk.baseline_pred);
      std::swap(wk.model_band, wk.baseline_band);
    }
  }
  return out;
}

}  // namespace denguecast::forecast
