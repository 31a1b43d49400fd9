#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "denguecast/core.hpp"
#include "denguecast/mcmc.hpp"
#include "denguecast/model.hpp"
#include "denguecast/stats.hpp"

namespace denguecast::forecast {

/// Fit on weeks [fit_start, fit_start + fit_len), predict the following
/// `horizon` weeks. Week numbers are 1-based.
struct WindowSpec {
  int fit_start = 1;
  int fit_len = 12;
  int horizon = 4;  ///< effective horizon, already truncated at the series end

  int first_predicted() const noexcept { return fit_start + fit_len; }
  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// Stride-1 windows, T - fit_len of them; the last horizon - 1 windows are
/// truncated at week T. Empty when T <= fit_len.
std::vector<WindowSpec> sliding_windows(int weeks, int fit_len = 12, int horizon = 4);

// Tweet-conditioned predictive filtering.

struct Particle {
  double lambda = 0.0;
  double alpha = 0.0;
  double tau = 1.0;
  double log_pi = 0.0;
};

struct FilterConfig {
  int replicates = 10;                ///< forward particles per posterior draw
  double degeneracy_fraction = 0.01;  ///< flag when weight ESS falls below this share
  double interval = 0.90;             ///< central predictive interval
};

struct WeekForecast {
  double mean = 0.0;  ///< weighted predictive mean of expected cases
  double lower = 0.0;
  double upper = 0.0;
  double weight_ess = 0.0;
};

struct FilterResult {
  std::vector<WeekForecast> weeks;
  bool degenerate = false;
};

/// Weights already propagated particles by the Poisson likelihood of the
/// observed tweet count and summarises expected cases. Normalised weights
/// are written to `weights` (same length as `particles`).
WeekForecast weigh_particles(std::span<const Particle> particles, Count tweets, double exposure,
                             double interval, std::span<double> weights);

/// Each posterior draw seeds `replicates` particles at the fit-end log rate.
/// Every week: propagate log Pi by Normal(0, 1/tau), weight by the week's
/// tweet count, summarise, then multinomially resample.
FilterResult predictive_filter(const mcmc::PosteriorSamples& samples, std::span<const Count> future_tweets,
                               double exposure, const FilterConfig& config, stats::Rng& rng);

// Baseline: OLS of cases on same-week tweets.

struct BaselineForecast {
  std::vector<double> pred;
  bool failed = false;
};

BaselineForecast baseline_forecast(std::span<const Count> fit_cases, std::span<const Count> fit_tweets,
                                   std::span<const Count> future_tweets);

/// Weeks whose predicted band (prediction rounded to the nearest integer)
/// differs from the actual band.
int score_bands(std::span<const double> pred, std::span<const Count> actual, Count population);

// Backtesting.

struct WindowResult {
  WindowSpec window;
  std::vector<double> model_pred;
  std::vector<double> baseline_pred;
  std::vector<Count> actual;
  bool model_failed = false;
  bool baseline_failed = false;
  bool model_converged = true;
  bool filter_degenerate = false;
};

struct ExperimentConfig {
  int fit_len = 12;
  int horizon = 4;
  std::uint64_t seed = 1;
  mcmc::ChainConfig chain = mcmc::ChainConfig::desk();
  FilterConfig filter;
  /// Parallel workers over windows; 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

/// Refits every window from scratch with per-window seeds derived from
/// (seed, city, window), so results do not depend on the worker count.
std::vector<WindowResult> run_experiment(const WeeklySeries& series, const model::Priors& priors,
                                         const ExperimentConfig& config);

// Cross-city comparison.

struct ScoredWeek {
  Count actual = 0;
  double model_pred = 0.0;
  double baseline_pred = 0.0;
  IncidenceBand actual_band = IncidenceBand::Low;
  IncidenceBand model_band = IncidenceBand::Low;
  IncidenceBand baseline_band = IncidenceBand::Low;
};

struct WindowScore {
  bool model_failed = false;
  bool baseline_failed = false;
  std::vector<ScoredWeek> weeks;
};

struct CityScore {
  CityId city;
  std::vector<WindowScore> windows;
};

WindowScore score_window(const WindowResult& result, Count population);

enum class Verdict { Win, TieBrokenWin, TieBrokenLoss, Loss, Excluded };

std::string_view to_string(Verdict verdict);

struct CityComparison {
  CityId city;
  int model_band_mistakes = 0;
  int baseline_band_mistakes = 0;
  double model_abs_error = 0.0;
  double baseline_abs_error = 0.0;
  Verdict verdict = Verdict::Excluded;
};

struct ComparisonSummary {
  int wins = 0;
  int ties = 0;
  int losses = 0;
  int tie_broken_wins = 0;
  int excluded = 0;

  int compared() const noexcept { return wins + ties + losses; }
  /// (wins + ties) / compared: model at least as good on band mistakes.
  double as_good_share() const noexcept;
  /// (wins + tie-broken wins) / compared.
  double best_share() const noexcept;
};

struct Comparison {
  std::vector<CityComparison> cities;
  ComparisonSummary summary;
};

/// Fewer band mistakes wins; equal mistakes are broken by the total absolute
/// error (an exact tie in error counts as a tie-broken loss). Cities with any
/// failed window for either method are excluded.
Comparison compare_cities(std::span<const CityScore> cities);

/// Same comparison with the model and baseline roles exchanged.
CityScore swap_methods(const CityScore& city);

}  // namespace denguecast::forecast
