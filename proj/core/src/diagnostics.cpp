#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "denguecast/mcmc.hpp"

namespace denguecast::mcmc {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  return m;
}

}  // namespace

std::optional<double> gelman_rubin(std::span<const std::vector<double>> chains) {
  if (chains.size() < 2) throw std::invalid_argument("gelman_rubin: need at least two chains");
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (n < 10) throw std::invalid_argument("gelman_rubin: need at least 10 draws per chain");

  // Split every chain in half (dropping the middle draw of odd lengths).
  const std::size_t half = n / 2;
  std::vector<Moments> parts;
  for (const auto& c : chains) {
    std::span<const double> s(c.data(), n);
    parts.push_back(moments(s.first(half)));
    parts.push_back(moments(s.last(half)));
  }
  const double m = static_cast<double>(parts.size());
  const double len = static_cast<double>(half);
  double grand = 0.0, within = 0.0;
  for (const auto& p : parts) {
    grand += p.mean;
    within += p.var;
  }
  grand /= m;
  within /= m;
  if (!(within > 0.0)) return std::nullopt;
  double between = 0.0;
  for (const auto& p : parts) between += (p.mean - grand) * (p.mean - grand);
  between *= len / (m - 1.0);
  double var_plus = (len - 1.0) / len * within + between / len;
  return std::max(1.0, std::sqrt(var_plus / within));
}

double effective_sample_size(std::span<const std::vector<double>> chains) {
  if (chains.empty()) throw std::invalid_argument("effective_sample_size: no chains");
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  const double m = static_cast<double>(chains.size());
  const double total = m * static_cast<double>(n);
  if (n < 4) return total;

  std::vector<Moments> mom;
  for (const auto& c : chains) mom.push_back(moments(std::span<const double>(c.data(), n)));
  double within = 0.0, grand = 0.0;
  for (const auto& x : mom) {
    within += x.var;
    grand += x.mean;
  }
  within /= m;
  grand /= m;
  double between = 0.0;
  if (chains.size() > 1) {
    for (const auto& x : mom) between += (x.mean - grand) * (x.mean - grand);
    between *= static_cast<double>(n) / (m - 1.0);
  }
  const double nd = static_cast<double>(n);
  double var_plus = (nd - 1.0) / nd * within + (chains.size() > 1 ? between / nd : 0.0);
  if (!(var_plus > 0.0)) return total;

  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto& x = chains[c];
      double mu = mom[c].mean;
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mu) * (x[i + lag] - mu);
      acc += s / nd;
    }
    return acc / m;
  };
  auto rho = [&](std::size_t lag) { return 1.0 - (within - autocov(lag)) / var_plus; };

  // Geyer: sum consecutive pairs while positive, enforcing monotone pairs.
  double sum = 0.0;
  double prev_pair = 2.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = (k == 0 ? 1.0 : rho(2 * k)) + rho(2 * k + 1);
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    sum += pair;
  }
  double tau_int = -1.0 + 2.0 * sum;
  tau_int = std::max(tau_int, 1.0 / std::log10(total));
  return total / tau_int;
}

}  // namespace denguecast::mcmc
