#include "denguecast/model.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace denguecast::model {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::atomic<std::uint64_t> g_clamp_events{0};

}  // namespace

void Priors::validate() const {
  if (!(lambda_shape > 0.0 && lambda_rate > 0.0 && tau_shape > 0.0 && tau_rate > 0.0)) {
    throw std::invalid_argument("prior shapes and rates must be positive");
  }
  if (!(init_logpi_sd > 0.0)) throw std::invalid_argument("init_logpi_sd must be positive");
  if (!(alpha_low < alpha_high)) throw std::invalid_argument("alpha_low must be below alpha_high");
}

double clamp_log_pi(double log_pi) noexcept {
  if (log_pi > kLogPiLimit) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return kLogPiLimit;
  }
  if (log_pi < -kLogPiLimit) {
    g_clamp_events.fetch_add(1, std::memory_order_relaxed);
    return -kLogPiLimit;
  }
  return log_pi;
}

std::uint64_t clamp_event_count() noexcept { return g_clamp_events.load(std::memory_order_relaxed); }

double case_mean(const ModelParams&, double log_pi, double exposure) noexcept {
  return exposure * std::exp(clamp_log_pi(log_pi));
}

double tweet_mean(const ModelParams& params, double log_pi, double exposure) noexcept {
  return params.lambda + params.alpha * exposure * std::exp(clamp_log_pi(log_pi));
}

WeeklySeries simulate_observations(const ModelParams& params, const LatentPath& path, CityId city,
                                   Count population, Date start_week, stats::Rng& rng) {
  const double exposure = static_cast<double>(population) / 1e5;
  std::vector<Count> cases(path.size());
  std::vector<Count> tweets(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) {
    cases[t] = stats::sample_poisson(rng, case_mean(params, path.log_pi[t], exposure));
    tweets[t] = stats::sample_poisson(rng, tweet_mean(params, path.log_pi[t], exposure));
  }
  return WeeklySeries(std::move(city), population, start_week, std::move(cases), std::move(tweets));
}

Simulation simulate(const ModelParams& params, const Priors& priors, CityId city, Count population, std::size_t weeks,
                    Date start_week, stats::Rng& rng) {
  if (weeks == 0) throw std::invalid_argument("simulate: need at least one week");
  if (!(params.tau > 0.0)) throw std::invalid_argument("simulate: tau must be positive");
  LatentPath path;
  path.log_pi.resize(weeks);
  const double shock_sd = 1.0 / std::sqrt(params.tau);
  path.log_pi[0] = stats::sample_normal(rng, priors.init_logpi_mean, priors.init_logpi_sd);
  for (std::size_t t = 1; t < weeks; ++t) {
    path.log_pi[t] = path.log_pi[t - 1] + stats::sample_normal(rng, 0.0, shock_sd);
  }
  WeeklySeries series = simulate_observations(params, path, std::move(city), population, start_week, rng);
  return Simulation{std::move(series), std::move(path)};
}

double loglik(const ModelParams& params, const LatentPath& path, const WeeklySeries& series) {
  if (path.size() != series.size()) throw std::invalid_argument("loglik: path and series lengths differ");
  const double exposure = series.exposure_scale();
  auto cases = series.cases();
  auto tweets = series.tweets();
  double total = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    total += stats::logpmf_poisson(cases[t], case_mean(params, path.log_pi[t], exposure));
    total += stats::logpmf_poisson(tweets[t], tweet_mean(params, path.log_pi[t], exposure));
  }
  return total;
}

double logprior(const ModelParams& params, const LatentPath& path, const Priors& priors) {
  if (!(params.lambda > 0.0) || !(params.tau > 0.0)) return -kInf;
  if (!(params.alpha > priors.alpha_low && params.alpha < priors.alpha_high)) return -kInf;
  if (path.size() == 0) throw std::invalid_argument("logprior: empty path");
  double total = stats::logpdf_gamma(params.lambda, priors.lambda_shape, priors.lambda_rate) +
                 stats::logpdf_gamma(params.tau, priors.tau_shape, priors.tau_rate) -
                 std::log(priors.alpha_high - priors.alpha_low) +
                 stats::logpdf_normal(path.log_pi[0], priors.init_logpi_mean, priors.init_logpi_sd);
  const double shock_sd = 1.0 / std::sqrt(params.tau);
  for (std::size_t t = 1; t < path.size(); ++t) {
    total += stats::logpdf_normal(path.log_pi[t] - path.log_pi[t - 1], 0.0, shock_sd);
  }
  return total;
}

double logposterior(const ModelParams& params, const LatentPath& path, const WeeklySeries& series,
                    const Priors& priors) {
  double prior = logprior(params, path, priors);
  if (prior == -kInf) return -kInf;
  return loglik(params, path, series) + prior;
}

}  // namespace denguecast::model
