#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>

#include "denguecast/core.hpp"

namespace denguecast::stats {

/// xoshiro256** seeded through splitmix64. Identical seeds give identical
/// streams on every platform; no std::*_distribution is used anywhere, so
/// draws are reproducible across standard libraries too.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
};

/// Mixes a base seed with stream keys (city, window, chain, ...) into an
/// independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) noexcept;

/// Stable 64-bit FNV-1a hash, used to turn string identifiers into stream keys.
std::uint64_t hash_string(std::string_view text) noexcept;

double sample_normal(Rng& rng, double mean, double sd);

// Gamma distributions are parameterised by SHAPE and RATE everywhere in this
// library: mean = shape / rate, variance = shape / rate^2.
double sample_gamma(Rng& rng, double shape, double rate);

Count sample_poisson(Rng& rng, double mean);
Count sample_binomial(Rng& rng, Count n, double p);

/// Gamma(shape, rate) restricted to (0, 1), by inversion of the truncated
/// CDF. rate == 0 gives the Beta(shape, 1) limit (uniform when shape == 1).
double sample_truncated_gamma_unit(Rng& rng, double shape, double rate);

double log_gamma(double x) noexcept;
/// log P(a, z), the regularised lower incomplete gamma function.
double log_gamma_p(double a, double z);

double logpmf_poisson(Count k, double mean) noexcept;
double logpdf_normal(double x, double mean, double sd) noexcept;
double logpdf_gamma(double x, double shape, double rate) noexcept;

/// Sample Pearson correlation; nullopt when either series is constant.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  /// Predictor had zero variance; intercept is then the mean response and slope 0.
  bool degenerate = false;
};

LinearFit ols_fit(std::span<const double> x, std::span<const double> y);
double ols_predict(const LinearFit& fit, double x) noexcept;

}  // namespace denguecast::stats
