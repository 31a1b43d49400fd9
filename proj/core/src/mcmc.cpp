#include "denguecast/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace denguecast::mcmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTargetAcceptance = 0.44;
constexpr std::uint64_t kAdaptBatch = 50;

// Poisson log-kernel k log(mean) - mean; the log k! terms cancel in every MH
// ratio so they are left out.
double poisson_kernel(Count k, double log_mean, double mean) noexcept {
  return (k == 0 ? 0.0 : static_cast<double>(k) * log_mean) - mean;
}

double week_loglik(Count cases, Count tweets, double log_pi, const model::ModelParams& params,
                   double exposure, double log_exposure) noexcept {
  double l = model::clamp_log_pi(log_pi);
  double mu = exposure * std::exp(l);
  double nu = params.lambda + params.alpha * mu;
  return poisson_kernel(cases, log_exposure + l, mu) + poisson_kernel(tweets, std::log(nu), nu);
}

double week_logprior(std::size_t t, double value, const model::LatentPath& path, double tau,
                     const model::Priors& priors) noexcept {
  double lp;
  if (t == 0) {
    double z = (value - priors.init_logpi_mean) / priors.init_logpi_sd;
    lp = -0.5 * z * z;
  } else {
    double d = value - path.log_pi[t - 1];
    lp = -0.5 * tau * d * d;
  }
  if (t + 1 < path.size()) {
    double d = path.log_pi[t + 1] - value;
    lp -= 0.5 * tau * d * d;
  }
  return lp;
}

bool draw_in_support(const ChainState& s) {
  if (!s.params.in_support() || !(s.params.lambda > 0.0)) return false;
  if (!std::isfinite(s.params.lambda) || !std::isfinite(s.params.tau)) return false;
  return std::ranges::all_of(s.path.log_pi, [](double v) { return std::isfinite(v); });
}

struct SingleChain {
  std::vector<Draw> draws;
  std::vector<std::uint64_t> accepted;
  long post_burn_iters = 0;
  bool out_of_support = false;
};

SingleChain run_single(const WeeklySeries& series, const model::Priors& priors, const ChainConfig& config,
                       int chain) {
  stats::Rng rng(stats::derive_seed(config.seed, {static_cast<std::uint64_t>(chain)}));
  ChainState state = initial_state(series);
  Sampler sampler(priors, series.size(), config.proposal_sd_init, config.use_likelihood);
  SingleChain out;
  out.draws.reserve(static_cast<std::size_t>(config.retained_per_chain()));

  std::uint64_t batch = 0;
  for (long it = 0; it < config.n_iters; ++it) {
    if (it == config.burn_in) sampler.reset_acceptance();
    sampler.sweep(state, series, rng);
    if (it < config.burn_in) {
      if (config.adapt && (it + 1) % static_cast<long>(kAdaptBatch) == 0) {
        sampler.adapt(kAdaptBatch, ++batch);
        sampler.reset_acceptance();
      }
      continue;
    }
    if ((it - config.burn_in + 1) % config.thin == 0) {
      if (!draw_in_support(state)) out.out_of_support = true;
      out.draws.push_back(Draw{chain, it + 1, state.params, state.path});
    }
  }
  out.post_burn_iters = config.n_iters - config.burn_in;
  auto acc = sampler.accepted();
  out.accepted.assign(acc.begin(), acc.end());
  return out;
}

}  // namespace

ChainConfig ChainConfig::desk() { return ChainConfig{}; }

ChainConfig ChainConfig::paper() {
  ChainConfig c;
  c.n_iters = 1'000'000;
  c.burn_in = 500'000;
  c.thin = 1'000;
  return c;
}

long ChainConfig::retained_per_chain() const noexcept {
  return thin > 0 && n_iters > burn_in ? (n_iters - burn_in) / thin : 0;
}

void ChainConfig::validate() const {
  if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
  if (n_iters < 1 || burn_in < 0 || burn_in >= n_iters || thin < 1) {
    throw std::invalid_argument("need n_iters > burn_in >= 0 and thin >= 1");
  }
  if (retained_per_chain() < 100) {
    throw std::invalid_argument("chain configuration retains fewer than 100 draws per chain");
  }
  if (!(proposal_sd_init > 0.0)) throw std::invalid_argument("proposal_sd_init must be positive");
}

std::vector<std::vector<double>> PosteriorSamples::trace(Scalar which) const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n_chains));
  for (const auto& d : draws) {
    double v = which == Scalar::Lambda ? d.params.lambda : which == Scalar::Alpha ? d.params.alpha : d.params.tau;
    out[static_cast<std::size_t>(d.chain)].push_back(v);
  }
  return out;
}

double PosteriorSamples::mean(Scalar which) const {
  if (draws.empty()) throw std::logic_error("mean of empty posterior sample");
  double s = 0.0;
  for (const auto& d : draws) {
    s += which == Scalar::Lambda ? d.params.lambda : which == Scalar::Alpha ? d.params.alpha : d.params.tau;
  }
  return s / static_cast<double>(draws.size());
}

bool ChainDiagnostics::converged() const noexcept {
  return std::ranges::all_of(rhat, [](const auto& r) { return r.has_value() && *r <= kRhatThreshold; });
}

double ChainDiagnostics::max_rhat() const noexcept {
  double m = 1.0;
  for (const auto& r : rhat) m = r ? std::max(m, *r) : kInf;
  return m;
}

SplitCounts augment_split(Count tweets, double basal, double signal, stats::Rng& rng) {
  if (tweets == 0) return {};
  const double total = basal + signal;
  if (!(total > 0.0)) throw std::invalid_argument("augment_split: tweets observed under a zero rate");
  Count noise = stats::sample_binomial(rng, tweets, std::clamp(basal / total, 0.0, 1.0));
  return SplitCounts{noise, tweets - noise};
}

double gibbs_lambda(std::span<const Count> noise, const model::Priors& priors, stats::Rng& rng) {
  double total = 0.0;
  for (Count z : noise) total += static_cast<double>(z);
  return stats::sample_gamma(rng, priors.lambda_shape + total,
                             priors.lambda_rate + static_cast<double>(noise.size()));
}

double gibbs_alpha(std::span<const Count> signal, const model::LatentPath& path, double exposure,
                   stats::Rng& rng) {
  if (signal.size() != path.size()) throw std::invalid_argument("gibbs_alpha: length mismatch");
  double total = 0.0;
  double rate = 0.0;
  for (std::size_t t = 0; t < signal.size(); ++t) {
    total += static_cast<double>(signal[t]);
    rate += std::exp(model::clamp_log_pi(path.log_pi[t]));
  }
  return stats::sample_truncated_gamma_unit(rng, 1.0 + total, exposure * rate);
}

double gibbs_tau(const model::LatentPath& path, const model::Priors& priors, stats::Rng& rng) {
  double ss = 0.0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    double d = path.log_pi[t] - path.log_pi[t - 1];
    ss += d * d;
  }
  double increments = path.size() > 0 ? static_cast<double>(path.size() - 1) : 0.0;
  return stats::sample_gamma(rng, priors.tau_shape + 0.5 * increments, priors.tau_rate + 0.5 * ss);
}

double logpi_log_ratio(std::size_t t, double proposed, const model::ModelParams& params,
                       const model::LatentPath& path, const WeeklySeries& series, const model::Priors& priors,
                       bool use_likelihood) {
  const double current = path.log_pi[t];
  double ratio = week_logprior(t, proposed, path, params.tau, priors) -
                 week_logprior(t, current, path, params.tau, priors);
  if (use_likelihood) {
    const double exposure = series.exposure_scale();
    const double log_exposure = std::log(exposure);
    const Count y = series.cases()[t];
    const Count x = series.tweets()[t];
    ratio += week_loglik(y, x, proposed, params, exposure, log_exposure) -
             week_loglik(y, x, current, params, exposure, log_exposure);
  }
  return std::isnan(ratio) ? -kInf : ratio;
}

MhStep mh_update_logpi(std::size_t t, const model::ModelParams& params, const model::LatentPath& path,
                       const WeeklySeries& series, const model::Priors& priors, double proposal_sd,
                       stats::Rng& rng, bool use_likelihood) {
  if (t >= path.size()) throw std::out_of_range("mh_update_logpi: week out of range");
  double proposed = stats::sample_normal(rng, path.log_pi[t], proposal_sd);
  double log_ratio = logpi_log_ratio(t, proposed, params, path, series, priors, use_likelihood);
  if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) return MhStep{proposed, true};
  return MhStep{path.log_pi[t], false};
}

double ridge_log_ratio(const model::ModelParams& params, double lambda, double alpha, const model::LatentPath& path,
                       const WeeklySeries& series, const model::Priors& priors, bool use_likelihood) {
  if (!(lambda > 0.0) || !(alpha > priors.alpha_low) || !(alpha < priors.alpha_high)) return -kInf;
  double ratio = stats::logpdf_gamma(lambda, priors.lambda_shape, priors.lambda_rate) -
                 stats::logpdf_gamma(params.lambda, priors.lambda_shape, priors.lambda_rate);
  if (use_likelihood) {
    const double exposure = series.exposure_scale();
    for (std::size_t t = 0; t < path.size(); ++t) {
      const double m = exposure * std::exp(model::clamp_log_pi(path.log_pi[t]));
      const double now = params.lambda + params.alpha * m;
      const double next = lambda + alpha * m;
      const auto x = static_cast<double>(series.tweets()[t]);
      ratio += (x > 0.0 ? x * (std::log(next) - std::log(now)) : 0.0) - (next - now);
    }
  }
  return std::isnan(ratio) ? -kInf : ratio;
}

RidgeStep ridge_update(const model::ModelParams& params, const model::LatentPath& path, const WeeklySeries& series,
                       const model::Priors& priors, double step_sd, stats::Rng& rng, bool use_likelihood) {
  const double exposure = series.exposure_scale();
  double mass = 0.0;
  for (double lp : path.log_pi) mass += exposure * std::exp(model::clamp_log_pi(lp));
  const double e = stats::sample_normal(rng, 0.0, step_sd);
  const double lambda = params.lambda + e;
  const double alpha = mass > 0.0 ? params.alpha - e * static_cast<double>(path.size()) / mass : params.alpha;
  const double log_ratio = ridge_log_ratio(params, lambda, alpha, path, series, priors, use_likelihood);
  if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) return RidgeStep{lambda, alpha, true};
  return RidgeStep{params.lambda, params.alpha, false};
}

ChainState initial_state(const WeeklySeries& series) {
  const double exposure = series.exposure_scale();
  ChainState s;
  s.path.log_pi.resize(series.size());
  double zero_case_tweets = 0.0;
  std::size_t zero_case_weeks = 0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    s.path.log_pi[t] = std::log((static_cast<double>(series.cases()[t]) + 0.5) / exposure);
    if (series.cases()[t] == 0) {
      zero_case_tweets += static_cast<double>(series.tweets()[t]);
      ++zero_case_weeks;
    }
  }
  double lambda = zero_case_weeks ? zero_case_tweets / static_cast<double>(zero_case_weeks) : 0.0;
  s.params = model::ModelParams{lambda > 0.0 ? lambda : 1.0, 0.1, 1.0};
  return s;
}

Sampler::Sampler(const model::Priors& priors, std::size_t weeks, double proposal_sd, bool use_likelihood)
    : priors_(priors),
      use_likelihood_(use_likelihood),
      proposal_sd_(weeks, proposal_sd),
      accepted_(weeks, 0),
      ridge_sd_(proposal_sd),
      noise_(weeks, 0),
      signal_(weeks, 0) {
  priors_.validate();
}

void Sampler::sweep(ChainState& state, const WeeklySeries& series, stats::Rng& rng) {
  const std::size_t weeks = state.path.size();
  if (weeks != series.size() || weeks != proposal_sd_.size()) {
    throw std::invalid_argument("Sampler::sweep: dimension mismatch");
  }
  const double exposure = series.exposure_scale();
  auto& p = state.params;

  if (use_likelihood_) {
    for (std::size_t t = 0; t < weeks; ++t) {
      const double signal = p.alpha * exposure * std::exp(model::clamp_log_pi(state.path.log_pi[t]));
      SplitCounts split = augment_split(series.tweets()[t], p.lambda, signal, rng);
      noise_[t] = split.noise;
      signal_[t] = split.signal;
    }
    p.lambda = gibbs_lambda(noise_, priors_, rng);
    p.alpha = gibbs_alpha(signal_, state.path, exposure, rng);
  } else {
    p.lambda = gibbs_lambda({}, priors_, rng);
    p.alpha = stats::sample_truncated_gamma_unit(rng, 1.0, 0.0);
  }
  p.tau = gibbs_tau(state.path, priors_, rng);

  RidgeStep ridge = ridge_update(p, state.path, series, priors_, ridge_sd_, rng, use_likelihood_);
  p.lambda = ridge.lambda;
  p.alpha = ridge.alpha;
  ridge_accepted_ += ridge.accepted ? 1 : 0;

  for (std::size_t t = 0; t < weeks; ++t) {
    MhStep step = mh_update_logpi(t, p, state.path, series, priors_, proposal_sd_[t], rng, use_likelihood_);
    state.path.log_pi[t] = step.log_pi;
    accepted_[t] += step.accepted ? 1 : 0;
  }
}

void Sampler::reset_acceptance() noexcept {
  std::ranges::fill(accepted_, 0);
  ridge_accepted_ = 0;
}

void Sampler::adapt(std::uint64_t batch_size, std::uint64_t batch_index) noexcept {
  const double delta = std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batch_index)));
  for (std::size_t t = 0; t < proposal_sd_.size(); ++t) {
    double rate = static_cast<double>(accepted_[t]) / static_cast<double>(batch_size);
    proposal_sd_[t] *= std::exp(rate > kTargetAcceptance ? delta : -delta);
  }
  double ridge_rate = static_cast<double>(ridge_accepted_) / static_cast<double>(batch_size);
  ridge_sd_ *= std::exp(ridge_rate > kTargetAcceptance ? delta : -delta);
}

ChainResult run_chain(const WeeklySeries& series, const model::Priors& priors, const ChainConfig& config) {
  config.validate();
  priors.validate();
  if (series.size() < 2) throw std::invalid_argument("run_chain: need at least two weeks");

  ChainResult result;
  result.samples.weeks = series.size();
  result.samples.n_chains = config.n_chains;

  {
    ChainState init = initial_state(series);
    double lp = config.use_likelihood ? model::logposterior(init.params, init.path, series, priors)
                                      : model::logprior(init.params, init.path, priors);
    if (!std::isfinite(lp)) {
      result.diagnostics.init_failed = true;
      return result;
    }
  }

  std::vector<SingleChain> chains(static_cast<std::size_t>(config.n_chains));
  if (config.n_chains > 1 && std::thread::hardware_concurrency() > 1) {
    std::vector<std::exception_ptr> errors(chains.size());
    std::vector<std::jthread> workers;
    for (int c = 0; c < config.n_chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          chains[static_cast<std::size_t>(c)] = run_single(series, priors, config, c);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (int c = 0; c < config.n_chains; ++c) chains[static_cast<std::size_t>(c)] = run_single(series, priors, config, c);
  }

  auto& diag = result.diagnostics;
  diag.acceptance_rate_logpi.assign(series.size(), 0.0);
  for (auto& ch : chains) {
    diag.out_of_support = diag.out_of_support || ch.out_of_support;
    for (std::size_t t = 0; t < series.size(); ++t) {
      diag.acceptance_rate_logpi[t] += static_cast<double>(ch.accepted[t]) /
                                       static_cast<double>(ch.post_burn_iters) / config.n_chains;
    }
    std::ranges::move(ch.draws, std::back_inserter(result.samples.draws));
  }

  for (std::size_t i = 0; i < kScalars.size(); ++i) {
    auto trace = result.samples.trace(kScalars[i]);
    diag.ess[i] = effective_sample_size(trace);
    if (trace.size() == 1) {
      // A single chain is split in halves, which is what split R-hat does anyway.
      auto& only = trace.front();
      auto mid = only.begin() + static_cast<std::ptrdiff_t>(only.size() / 2);
      trace = {std::vector<double>(only.begin(), mid), std::vector<double>(mid, only.end())};
    }
    diag.rhat[i] = gelman_rubin(trace);
  }
  return result;
}

}  // namespace denguecast::mcmc
