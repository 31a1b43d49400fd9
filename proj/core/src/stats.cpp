#include "denguecast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <math.h>

namespace denguecast::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-15;

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

/// Marsaglia and Tsang (2000) for shape >= 1, unit rate.
double gamma_large(Rng& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x = sample_normal(rng, 0.0, 1.0);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = rng.uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

/// Hoermann's PTRS transformed rejection, mean >= 10.
Count poisson_ptrs(Rng& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<Count>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - log_gamma(k + 1.0)) {
      return static_cast<Count>(k);
    }
  }
}

/// Sequential inversion, for n * p < 30 with p <= 0.5.
Count binomial_inversion(Rng& rng, Count n, double p) {
  const double q = 1.0 - p;
  const double qn = std::exp(static_cast<double>(n) * std::log1p(-p));
  const double np = static_cast<double>(n) * p;
  const double bound = std::min(static_cast<double>(n), np + 10.0 * std::sqrt(np * q + 1.0));
  Count x = 0;
  double px = qn;
  double u = rng.uniform();
  while (u > px) {
    ++x;
    if (static_cast<double>(x) > bound) {
      x = 0;
      px = qn;
      u = rng.uniform();
    } else {
      u -= px;
      px = (static_cast<double>(n - x + 1) * p * px) / (static_cast<double>(x) * q);
    }
  }
  return x;
}

/// Hoermann's BTRS transformed rejection, n * p >= 30 with p <= 0.5.
Count binomial_btrs(Rng& rng, Count n, double p) {
  const double nd = static_cast<double>(n);
  const double q = 1.0 - p;
  const double spq = std::sqrt(nd * p * q);
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double vr = 0.92 - 4.2 / b;
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double lpq = std::log(p / q);
  const double m = std::floor((nd + 1.0) * p);
  const double h = log_gamma(m + 1.0) + log_gamma(nd - m + 1.0);
  while (true) {
    double u = rng.uniform() - 0.5;
    double v = rng.uniform();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + c);
    if (k < 0.0 || k > nd) continue;
    if (us >= 0.07 && v <= vr) return static_cast<Count>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    if (v <= h - log_gamma(k + 1.0) - log_gamma(nd - k + 1.0) + (k - m) * lpq) {
      return static_cast<Count>(k);
    }
  }
}

double log_gamma_q_cf(double a, double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return a * std::log(z) - z - log_gamma(a) + std::log(h);
}

double log_gamma_p_series(double a, double z) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= z / (a + n);
    sum += term;
    if (term < sum * kEps) break;
  }
  return a * std::log(z) - z - log_gamma(a) + std::log(sum);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : state_) s = splitmix64(x);
}

std::uint64_t Rng::next_u64() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() noexcept {
  // 53 random bits, shifted half a step so 0 and 1 are both excluded.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t x = base;
  std::uint64_t h = splitmix64(x);
  for (std::uint64_t k : keys) {
    std::uint64_t y = h ^ (k + 0x632BE59BD9B4E019ULL);
    h = splitmix64(y);
  }
  return h;
}

std::uint64_t hash_string(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

double sample_normal(Rng& rng, double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("sample_normal: sd must be positive");
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + sd * z;
}

double sample_gamma(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("sample_gamma: shape and rate must be positive");
  }
  if (shape >= 1.0) return gamma_large(rng, shape) / rate;
  // Boost to shape + 1 and scale by U^(1/shape); done in log space because
  // shapes near 0.01 push U^(1/shape) below the double range.
  double log_g = std::log(gamma_large(rng, shape + 1.0)) + std::log(rng.uniform()) / shape - std::log(rate);
  double g = std::exp(log_g);
  return g > 0.0 ? g : std::numeric_limits<double>::min();
}

Count sample_poisson(Rng& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("sample_poisson: mean must be finite and non-negative");
  }
  if (mean > 1e15) throw std::overflow_error("sample_poisson: mean too large for integer counts");
  if (mean == 0.0) return 0;
  if (mean >= 10.0) return poisson_ptrs(rng, mean);
  const double limit = std::exp(-mean);
  Count k = 0;
  double prod = rng.uniform();
  while (prod > limit) {
    ++k;
    prod *= rng.uniform();
  }
  return k;
}

Count sample_binomial(Rng& rng, Count n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_binomial: need n >= 0 and p in [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - sample_binomial(rng, n, 1.0 - p);
  if (static_cast<double>(n) * p < 30.0) return binomial_inversion(rng, n, p);
  return binomial_btrs(rng, n, p);
}

double sample_truncated_gamma_unit(Rng& rng, double shape, double rate) {
  if (!(shape > 0.0) || !(rate >= 0.0)) {
    throw std::invalid_argument("sample_truncated_gamma_unit: need shape > 0 and rate >= 0");
  }
  constexpr double below_one = 1.0 - 0x1.0p-53;
  constexpr double above_zero = std::numeric_limits<double>::min();
  const double log_u = std::log(rng.uniform());
  double x;
  if (rate == 0.0) {
    x = std::exp(log_u / shape);
  } else {
    // Solve log P(shape, rate * x) = log u + log P(shape, rate) for y = log x
    // by bracketed Newton; log P is increasing and concave-ish in y.
    const double target = log_u + log_gamma_p(shape, rate);
    auto g = [&](double y) { return log_gamma_p(shape, rate * std::exp(y)) - target; };
    auto dg = [&](double y, double gy) {
      double z = rate * std::exp(y);
      return std::exp(shape * std::log(z) - z - log_gamma(shape) - (gy + target));
    };
    double hi = 0.0;
    double lo = -1.0;
    while (g(lo) > 0.0 && lo > -745.0) lo *= 2.0;
    double y = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      double gy = g(y);
      if (gy > 0.0) hi = y; else lo = y;
      double step = gy / dg(y, gy);
      double next = y - step;
      if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      if (std::fabs(next - y) < 1e-13 * (1.0 + std::fabs(y)) || hi - lo < 1e-15) {
        y = next;
        break;
      }
      y = next;
    }
    x = std::exp(y);
  }
  if (x >= 1.0) x = below_one;
  if (x <= 0.0) x = above_zero;
  return x;
}

double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_gamma_p(double a, double z) {
  if (!(a > 0.0)) throw std::invalid_argument("log_gamma_p: a must be positive");
  if (z <= 0.0) return -kInf;
  if (std::isinf(z)) return 0.0;
  if (z < a + 1.0) return log_gamma_p_series(a, z);
  return std::log1p(-std::exp(log_gamma_q_cf(a, z)));
}

double logpmf_poisson(Count k, double mean) noexcept {
  if (k < 0) return -kInf;
  if (mean == 0.0) return k == 0 ? 0.0 : -kInf;
  double kd = static_cast<double>(k);
  return (k == 0 ? 0.0 : kd * std::log(mean)) - mean - log_gamma(kd + 1.0);
}

double logpdf_normal(double x, double mean, double sd) noexcept {
  double z = (x - mean) / sd;
  return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd) - 0.5 * z * z;
}

double logpdf_gamma(double x, double shape, double rate) noexcept {
  if (!(x > 0.0)) return -kInf;
  return shape * std::log(rate) - log_gamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson: need equal lengths >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("ols_fit: need equal lengths >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  if (sxx == 0.0) return LinearFit{my, 0.0, true};
  double slope = sxy / sxx;
  return LinearFit{my - slope * mx, slope, false};
}

double ols_predict(const LinearFit& fit, double x) noexcept { return fit.intercept + fit.slope * x; }

}  // namespace denguecast::stats
