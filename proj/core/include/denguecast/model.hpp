#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "denguecast/core.hpp"
#include "denguecast/stats.hpp"

namespace denguecast::model {

/// Y_t ~ Poisson(c * Pi_t), X_t ~ Poisson(lambda + alpha * c * Pi_t) with
/// c = population / 1e5 and log Pi_t a Gaussian random walk of precision tau.
struct ModelParams {
  double lambda = 1.0;  ///< basal dengue-unrelated tweets per week
  double alpha = 0.1;   ///< tweets per expected case
  double tau = 1.0;     ///< precision of the weekly log-rate shocks

  bool in_support() const noexcept { return lambda >= 0.0 && alpha > 0.0 && alpha < 1.0 && tau > 0.0; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// log Pi_t per week, Pi_t being the rate per 100 000 inhabitants.
struct LatentPath {
  std::vector<double> log_pi;

  std::size_t size() const noexcept { return log_pi.size(); }
  friend bool operator==(const LatentPath&, const LatentPath&) = default;
};

/// Hyperparameters. Gamma priors use shape/rate: lambda has prior mean
/// 0.0225 / 0.0075 = 3 and sd 20, tau has mean 1 and sd 10.
struct Priors {
  double lambda_shape = 0.0225;
  double lambda_rate = 0.0075;
  double tau_shape = 0.01;
  double tau_rate = 0.01;
  double alpha_low = 0.0;
  double alpha_high = 1.0;
  /// log Pi_1 ~ Normal(init_logpi_mean, init_logpi_sd^2), diffuse on the
  /// per-100k log scale.
  double init_logpi_mean = 0.0;
  double init_logpi_sd = 10.0;

  /// Throws std::invalid_argument on non-positive shapes/rates/sd or an empty alpha range.
  void validate() const;
};

/// log Pi is clamped to this range before exponentiation; each clamp is
/// counted (see clamp_event_count) so it never happens silently.
inline constexpr double kLogPiLimit = 700.0;

double clamp_log_pi(double log_pi) noexcept;
std::uint64_t clamp_event_count() noexcept;

/// exposure * exp(log_pi).
double case_mean(const ModelParams& params, double log_pi, double exposure) noexcept;
/// lambda + alpha * exposure * exp(log_pi).
double tweet_mean(const ModelParams& params, double log_pi, double exposure) noexcept;

struct Simulation {
  WeeklySeries series;
  LatentPath path;
};

/// Draws log Pi_1 from the initial-state prior, walks forward with
/// Normal(0, 1/tau) shocks, then draws cases and tweets.
Simulation simulate(const ModelParams& params, const Priors& priors, CityId city, Count population, std::size_t weeks,
                    Date start_week, stats::Rng& rng);

/// Cases and tweets for a fixed latent path.
WeeklySeries simulate_observations(const ModelParams& params, const LatentPath& path, CityId city,
                                   Count population, Date start_week, stats::Rng& rng);

double loglik(const ModelParams& params, const LatentPath& path, const WeeklySeries& series);
/// -inf outside the prior support (signals rejection, not failure).
double logprior(const ModelParams& params, const LatentPath& path, const Priors& priors);
double logposterior(const ModelParams& params, const LatentPath& path, const WeeklySeries& series,
                    const Priors& priors);

/// Same sum with a caller-supplied prior term, e.g. a flat test double.
template <class LogPrior>
double logposterior_with(const ModelParams& params, const LatentPath& path, const WeeklySeries& series,
                         LogPrior&& log_prior) {
  return loglik(params, path, series) + log_prior(params, path);
}

}  // namespace denguecast::model
