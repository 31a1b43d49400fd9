#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "denguecast/stats.hpp"
#include "oracles.hpp"

using namespace denguecast;
using namespace denguecast::stats;

namespace {

constexpr int kDraws = 100000;

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
Moments moments(F&& draw, int n = kDraws) {
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = draw();
    s += v;
    s2 += v * v;
  }
  Moments m;
  m.mean = s / n;
  m.var = (s2 - n * m.mean * m.mean) / (n - 1);
  return m;
}

/// Five standard errors of a sample mean with the given true variance.
double five_se(double variance, int n = kDraws) { return 5.0 * std::sqrt(variance / n); }

}  // namespace

TEST(Rng, SameSeedSameStream) {
  Rng a(42);
  Rng b(42);
  Rng c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformOpenInterval) {
  Rng rng(1);
  for (int i = 0; i < kDraws; ++i) {
    double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, DerivedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {1}));
  EXPECT_NE(derive_seed(1, {0, 1}), derive_seed(1, {1, 0}));
  EXPECT_EQ(derive_seed(9, {3, 4}), derive_seed(9, {3, 4}));
  EXPECT_EQ(hash_string("manaus"), hash_string("manaus"));
  EXPECT_NE(hash_string("manaus"), hash_string("recife"));
}

TEST(SampleNormal, Examples) {
  Rng rng(3);
  EXPECT_NEAR(sample_normal(rng, 5.0, 1e-12), 5.0, 1e-6);
  auto m0 = moments([&] { return sample_normal(rng, 0.0, 1.0); });
  EXPECT_NEAR(m0.mean, 0.0, 0.02);
  auto m2 = moments([&] { return sample_normal(rng, 0.0, 2.0); });
  EXPECT_NEAR(m2.var, 4.0, 0.2);
}

TEST(SampleGamma, PriorArithmetic) {
  Rng rng(5);
  std::vector<double> lambda(kDraws);
  for (double& v : lambda) v = sample_gamma(rng, 0.0225, 0.0075);
  double mean = 0.0;
  double tail = 0.0;
  for (double v : lambda) {
    mean += v;
    tail += v > 50.0;
  }
  EXPECT_NEAR(mean / kDraws, 3.0, 0.6);
  EXPECT_NEAR(tail / kDraws, 0.017, 0.005);
  auto tau = moments([&] { return sample_gamma(rng, 0.01, 0.01); });
  EXPECT_NEAR(tau.mean, 1.0, 0.3);
}

TEST(SampleGamma, MomentsAcrossShapes) {
  Rng rng(6);
  for (double shape : {0.3, 1.0, 2.5, 40.0}) {
    const double rate = 2.0;
    auto m = moments([&] { return sample_gamma(rng, shape, rate); });
    const double var = shape / (rate * rate);
    EXPECT_NEAR(m.mean, shape / rate, five_se(var)) << "shape " << shape;
    EXPECT_NEAR(m.var, var, 0.05 * var) << "shape " << shape;
  }
}

TEST(SampleGamma, SmallShapeStaysPositive) {
  Rng rng(7);
  for (int i = 0; i < kDraws; ++i) ASSERT_GT(sample_gamma(rng, 0.01, 0.01), 0.0);
}

TEST(SamplePoisson, Examples) {
  Rng rng(8);
  EXPECT_EQ(sample_poisson(rng, 0.0), 0);
  auto m = moments([&] { return static_cast<double>(sample_poisson(rng, 7.0)); });
  EXPECT_NEAR(m.mean, 7.0, 0.1);
  EXPECT_NEAR(m.var, 7.0, 0.3);
}

TEST(SamplePoisson, BothRegimes) {
  Rng rng(9);
  for (double mu : {0.5, 9.99, 10.0, 250.0, 1e6}) {
    auto m = moments([&] { return static_cast<double>(sample_poisson(rng, mu)); });
    EXPECT_NEAR(m.mean, mu, five_se(mu)) << mu;
    EXPECT_NEAR(m.var, mu, 0.05 * mu) << mu;
  }
}

TEST(SampleBinomial, Examples) {
  Rng rng(10);
  EXPECT_EQ(sample_binomial(rng, 10, 0.0), 0);
  EXPECT_EQ(sample_binomial(rng, 10, 1.0), 10);
  EXPECT_EQ(sample_binomial(rng, 0, 0.5), 0);
  auto m = moments([&] { return static_cast<double>(sample_binomial(rng, 20, 0.3)); });
  EXPECT_NEAR(m.mean, 6.0, 0.1);
}

TEST(SampleBinomial, BothRegimes) {
  Rng rng(11);
  for (auto [n, p] : {std::pair<Count, double>{50, 0.1}, {1000, 0.4}, {100000, 0.97}}) {
    const double var = static_cast<double>(n) * p * (1 - p);
    auto m = moments([&] { return static_cast<double>(sample_binomial(rng, n, p)); });
    EXPECT_NEAR(m.mean, static_cast<double>(n) * p, five_se(var)) << n << " " << p;
    EXPECT_NEAR(m.var, var, 0.05 * var) << n << " " << p;
  }
}

TEST(TruncatedGamma, UniformLimit) {
  Rng rng(12);
  auto m = moments([&] { return sample_truncated_gamma_unit(rng, 1.0, 0.0); });
  EXPECT_NEAR(m.mean, 0.5, 0.01);
}

namespace {

// Integral of x^(a-1) e^(-b x) g(x) over (0, z). For a < 1 the substitution
// u = x^a removes the singularity at 0.
double gamma_kernel_integral(double a, double b, double z, const std::function<double(double)>& g,
                             std::size_t n = 200000) {
  if (a >= 1.0) {
    return oracle::simpson([&](double x) { return std::pow(x, a - 1.0) * std::exp(-b * x) * g(x); }, 0.0, z, n);
  }
  return oracle::simpson(
             [&](double u) {
               const double x = std::pow(u, 1.0 / a);
               return std::exp(-b * x) * g(x);
             },
             0.0, std::pow(z, a), n) /
         a;
}

}  // namespace

TEST(TruncatedGamma, MatchesQuadratureMean) {
  Rng rng(13);
  for (auto [shape, rate] : {std::pair{2.0, 1.0}, {5.0, 30.0}, {0.7, 3.0}, {0.2, 0.5}, {40.0, 20.0}}) {
    const double z = gamma_kernel_integral(shape, rate, 1.0, [](double) { return 1.0; });
    const double mean = gamma_kernel_integral(shape, rate, 1.0, [](double x) { return x; }) / z;
    auto m = moments([&] { return sample_truncated_gamma_unit(rng, shape, rate); });
    EXPECT_NEAR(m.mean, mean, 0.01) << shape << " " << rate;
  }
}

TEST(TruncatedGamma, StrictlyInsideUnitInterval) {
  Rng rng(14);
  for (int i = 0; i < kDraws; ++i) {
    double v = sample_truncated_gamma_unit(rng, 0.5, 100.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    double v = sample_truncated_gamma_unit(rng, 5000.0, 10.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(LogGammaP, ClosedForms) {
  for (double z : {0.01, 0.2, 1.0, 4.0, 25.0}) {
    EXPECT_NEAR(std::exp(log_gamma_p(0.5, z)), std::erf(std::sqrt(z)), 1e-10) << z;
    EXPECT_NEAR(std::exp(log_gamma_p(1.0, z)), -std::expm1(-z), 1e-10) << z;
    EXPECT_NEAR(std::exp(log_gamma_p(2.0, z)), 1.0 - std::exp(-z) * (1.0 + z), 1e-10) << z;
    EXPECT_NEAR(std::exp(log_gamma_p(3.0, z)), 1.0 - std::exp(-z) * (1.0 + z + z * z / 2.0), 1e-10) << z;
  }
}

TEST(LogGammaP, MatchesQuadrature) {
  for (auto [a, z] : {std::pair{0.5, 0.2}, {0.3, 2.0}, {2.0, 1.0}, {3.0, 10.0}, {30.0, 25.0}, {1.0, 0.01}}) {
    const double num = gamma_kernel_integral(a, 1.0, z, [](double) { return 1.0; }) / std::tgamma(a);
    EXPECT_NEAR(std::exp(log_gamma_p(a, z)), num, 1e-6 * std::max(1.0, num)) << a << " " << z;
  }
}

TEST(LogPmfPoisson, Examples) {
  EXPECT_DOUBLE_EQ(logpmf_poisson(0, 1.0), -1.0);
  EXPECT_DOUBLE_EQ(logpmf_poisson(0, 0.0), 0.0);
  EXPECT_EQ(logpmf_poisson(2, 0.0), -INFINITY);
  EXPECT_NEAR(logpmf_poisson(3, 2.5), 3 * std::log(2.5) - 2.5 - std::log(6.0), 1e-12);
}

TEST(LogPmfPoisson, SumsToOne) {
  double s = 0.0;
  for (Count k = 0; k <= 200; ++k) s += std::exp(logpmf_poisson(k, 10.0));
  EXPECT_NEAR(s, 1.0, 1e-8);
}

TEST(LogPmfPoisson, FiniteForLargeCounts) {
  EXPECT_TRUE(std::isfinite(logpmf_poisson(1'000'000, 999'000.0)));
  EXPECT_TRUE(std::isfinite(logpmf_poisson(1'000'000, std::exp(50.0))));
}

TEST(LogDensities, Examples) {
  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  EXPECT_NEAR(logpdf_normal(0, 0, 1), -half_log_2pi, 1e-15);
  EXPECT_NEAR(logpdf_normal(2, 0, 2), -half_log_2pi - std::log(2.0) - 0.5, 1e-12);
  EXPECT_NEAR(logpdf_gamma(1, 1, 1), -1.0, 1e-15);
  EXPECT_NEAR(logpdf_gamma(2.0, 3.0, 0.5), 3 * std::log(0.5) + 2 * std::log(2.0) - 1.0 - std::lgamma(3.0), 1e-12);
}

TEST(Pearson, Examples) {
  std::vector<double> a{1, 2, 3};
  std::vector<double> b{3, 2, 1};
  EXPECT_NEAR(*pearson(a, a), 1.0, 1e-15);
  EXPECT_NEAR(*pearson(a, b), -1.0, 1e-15);
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> y{2, 1, 4, 3};
  EXPECT_NEAR(*pearson(x, y), 0.6, 1e-12);
  std::vector<double> flat{2, 2, 2};
  EXPECT_FALSE(pearson(a, flat).has_value());
  EXPECT_THROW(pearson(a, x), std::invalid_argument);
}

TEST(Ols, Examples) {
  std::vector<double> x1{0, 1};
  std::vector<double> y1{0, 1};
  auto f1 = ols_fit(x1, y1);
  EXPECT_NEAR(f1.intercept, 0.0, 1e-12);
  EXPECT_NEAR(f1.slope, 1.0, 1e-12);
  std::vector<double> x2{0, 1, 2};
  std::vector<double> y2{1, 3, 5};
  auto f2 = ols_fit(x2, y2);
  EXPECT_NEAR(f2.intercept, 1.0, 1e-12);
  EXPECT_NEAR(f2.slope, 2.0, 1e-12);
  EXPECT_NEAR(ols_predict(f2, 3.0), 7.0, 1e-12);
  std::vector<double> xc{4, 4, 4};
  EXPECT_TRUE(ols_fit(xc, y2).degenerate);
  EXPECT_FALSE(f2.degenerate);
}

TEST(Ols, ResidualsOrthogonalToPredictor) {
  Rng rng(15);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(30);
    std::vector<double> y(30);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = sample_normal(rng, 10.0, 5.0);
      y[i] = 3.0 - 2.0 * x[i] + sample_normal(rng, 0.0, 4.0);
    }
    auto fit = ols_fit(x, y);
    double xbar = 0.0;
    for (double v : x) xbar += v / x.size();
    double dot = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double r = y[i] - ols_predict(fit, x[i]);
      dot += (x[i] - xbar) * r;
      scale += std::fabs((x[i] - xbar) * y[i]);
    }
    EXPECT_LE(std::fabs(dot), 1e-8 * scale);
  }
}

TEST(Determinism, SamplersReplay) {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) {
      out.push_back(sample_normal(rng, 0, 1));
      out.push_back(sample_gamma(rng, 0.01, 0.01));
      out.push_back(static_cast<double>(sample_poisson(rng, 33.0)));
      out.push_back(static_cast<double>(sample_binomial(rng, 70, 0.6)));
      out.push_back(sample_truncated_gamma_unit(rng, 3.0, 4.0));
    }
    return out;
  };
  EXPECT_EQ(run(99), run(99));
}
