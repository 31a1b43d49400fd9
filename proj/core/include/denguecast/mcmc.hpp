#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "denguecast/core.hpp"
#include "denguecast/model.hpp"
#include "denguecast/stats.hpp"

namespace denguecast::mcmc {

struct ChainConfig {
  int n_chains = 2;
  long n_iters = 20'000;
  long burn_in = 10'000;
  long thin = 10;
  double proposal_sd_init = 0.5;
  /// Tune per-week proposal sds towards 44% acceptance during burn-in only.
  bool adapt = true;
  std::uint64_t seed = 1;
  /// When false the Poisson likelihood terms are dropped and the chain
  /// targets the prior (test mode).
  bool use_likelihood = true;

  /// 2 x 20 000 iterations, burn-in 10 000, thin 10: 2 000 retained draws.
  static ChainConfig desk();
  /// 2 x 1e6 iterations, burn-in 5e5, thin 1 000.
  static ChainConfig paper();

  long retained_per_chain() const noexcept;
  /// Throws std::invalid_argument unless at least 100 draws per chain are retained.
  void validate() const;
};

struct Draw {
  int chain = 0;
  long iter = 0;  ///< 1-based iteration of the chain this draw was taken at
  model::ModelParams params;
  model::LatentPath path;
};

enum class Scalar { Lambda, Alpha, Tau };
inline constexpr std::array kScalars{Scalar::Lambda, Scalar::Alpha, Scalar::Tau};

struct PosteriorSamples {
  std::size_t weeks = 0;
  int n_chains = 0;
  std::vector<Draw> draws;

  /// Per-chain trace of one scalar parameter, in draw order.
  std::vector<std::vector<double>> trace(Scalar which) const;
  double mean(Scalar which) const;
};

inline constexpr double kRhatThreshold = 1.2;

struct ChainDiagnostics {
  /// Post-burn-in MH acceptance per week, averaged over chains.
  std::vector<double> acceptance_rate_logpi;
  /// Split R-hat for lambda, alpha, tau; nullopt when a trace is constant.
  std::array<std::optional<double>, 3> rhat{};
  std::array<double, 3> ess{};
  bool out_of_support = false;
  /// Logposterior at the initial state was not finite.
  bool init_failed = false;

  bool converged() const noexcept;
  double max_rhat() const noexcept;
};

struct ChainResult {
  PosteriorSamples samples;
  ChainDiagnostics diagnostics;

  bool failed() const noexcept { return diagnostics.out_of_support || diagnostics.init_failed; }
};

struct ChainState {
  model::ModelParams params;
  model::LatentPath path;
};

// Poisson superposition: X_t = Z_t + S_t with Z_t ~ Poisson(lambda) (noise)
// and S_t ~ Poisson(alpha c Pi_t) (signal). Given X_t the split is Binomial.
struct SplitCounts {
  Count noise = 0;
  Count signal = 0;
};

SplitCounts augment_split(Count tweets, double basal, double signal, stats::Rng& rng);

/// lambda | Z ~ Gamma(shape + sum Z, rate + T).
double gibbs_lambda(std::span<const Count> noise, const model::Priors& priors, stats::Rng& rng);
/// alpha | S, Pi ~ Gamma(1 + sum S, c * sum Pi_t) truncated to (0, 1).
double gibbs_alpha(std::span<const Count> signal, const model::LatentPath& path, double exposure,
                   stats::Rng& rng);
/// tau | Pi ~ Gamma(shape + (T - 1) / 2, rate + sum (dlog Pi)^2 / 2).
double gibbs_tau(const model::LatentPath& path, const model::Priors& priors, stats::Rng& rng);

/// log of the MH ratio for moving week t (0-based) of the path to `proposed`:
/// the week's two Poisson terms plus the adjacent random-walk terms (the
/// initial-state prior at t = 0).
double logpi_log_ratio(std::size_t t, double proposed, const model::ModelParams& params,
                       const model::LatentPath& path, const WeeklySeries& series, const model::Priors& priors,
                       bool use_likelihood = true);

struct MhStep {
  double log_pi = 0.0;
  bool accepted = false;
};

MhStep mh_update_logpi(std::size_t t, const model::ModelParams& params, const model::LatentPath& path,
                       const WeeklySeries& series, const model::Priors& priors, double proposal_sd,
                       stats::Rng& rng, bool use_likelihood = true);

struct RidgeStep {
  double lambda = 0.0;
  double alpha = 0.0;
  bool accepted = false;
};

/// Log MH ratio for moving (lambda, alpha) to the proposed pair with the
/// path held fixed; the tweet term is the marginal Poisson likelihood.
double ridge_log_ratio(const model::ModelParams& params, double lambda, double alpha, const model::LatentPath& path,
                       const WeeklySeries& series, const model::Priors& priors, bool use_likelihood = true);

/// Random-walk move along the lambda-alpha ridge: lambda' = lambda + e and
/// alpha' = alpha - e * T / M with M = sum_t c Pi_t, so the expected tweet
/// total is unchanged. The shear is volume preserving and symmetric.
RidgeStep ridge_update(const model::ModelParams& params, const model::LatentPath& path, const WeeklySeries& series,
                       const model::Priors& priors, double step_sd, stats::Rng& rng, bool use_likelihood = true);

/// Moment-matched start: log Pi_t = ln((Y_t + 0.5) / c), lambda = mean tweets
/// over zero-case weeks (1 if there are none or the mean is 0), alpha = 0.1, tau = 1.
ChainState initial_state(const WeeklySeries& series);

/// One Metropolis-within-Gibbs scan: augment every week, draw lambda, alpha,
/// tau from their full conditionals, take one ridge move on (lambda, alpha),
/// then sweep the path t = 1..T.
class Sampler {
 public:
  Sampler(const model::Priors& priors, std::size_t weeks, double proposal_sd, bool use_likelihood = true);

  void sweep(ChainState& state, const WeeklySeries& series, stats::Rng& rng);

  std::span<double> proposal_sd() noexcept { return proposal_sd_; }
  std::span<const std::uint64_t> accepted() const noexcept { return accepted_; }
  double ridge_sd() const noexcept { return ridge_sd_; }
  std::uint64_t ridge_accepted() const noexcept { return ridge_accepted_; }
  void reset_acceptance() noexcept;

  /// Roberts-Rosenthal batch adaptation of the log proposal sds.
  void adapt(std::uint64_t batch_size, std::uint64_t batch_index) noexcept;

 private:
  model::Priors priors_;
  bool use_likelihood_;
  std::vector<double> proposal_sd_;
  std::vector<std::uint64_t> accepted_;
  double ridge_sd_;
  std::uint64_t ridge_accepted_ = 0;
  std::vector<Count> noise_;
  std::vector<Count> signal_;
};

ChainResult run_chain(const WeeklySeries& series, const model::Priors& priors, const ChainConfig& config);

// Diagnostics.

/// Split R-hat. Requires >= 2 chains with >= 10 draws each; nullopt when the
/// within-chain variance is zero.
std::optional<double> gelman_rubin(std::span<const std::vector<double>> chains);

/// Multi-chain effective sample size with Geyer's initial positive sequence.
double effective_sample_size(std::span<const std::vector<double>> chains);

}  // namespace denguecast::mcmc
