#include "mwg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mwg {

double sample_mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("sample_mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double mean = sample_mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double effective_sample_size(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("effective_sample_size: empty input");
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 1.0;
  const double mean = sample_mean(x);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = x[i] - mean;

  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centred[i] * centred[i + lag];
    return s / static_cast<double>(n);
  };

  const double gamma0 = autocov(0);
  if (gamma0 <= 0.0) return 1.0;
  if (n < 4) return static_cast<double>(n);

  double sum_pairs = 0.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double pair = (autocov(2 * k) + autocov(2 * k + 1)) / gamma0;
    if (pair <= 0.0) break;
    sum_pairs += pair;
  }
  const double tau = std::max(-1.0 + 2.0 * sum_pairs, 1.0 / static_cast<double>(n));
  return std::clamp(static_cast<double>(n) / tau, std::numeric_limits<double>::min(),
                    static_cast<double>(n));
}

double gelman_rubin(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw std::invalid_argument("gelman_rubin: needs at least two chains");
  const std::size_t n = chains.front().size();
  if (n < 2) throw std::invalid_argument("gelman_rubin: chains too short");
  std::vector<double> means;
  double within = 0.0;
  for (const auto& chain : chains) {
    if (chain.size() != n) throw std::invalid_argument("gelman_rubin: unequal chain lengths");
    means.push_back(sample_mean(chain));
    within += sample_variance(chain);
  }
  within /= static_cast<double>(chains.size());
  const double between = static_cast<double>(n) * sample_variance(means);
  if (within <= 0.0) return 1.0;
  const double pooled =
      (static_cast<double>(n - 1) / static_cast<double>(n)) * within + between / static_cast<double>(n);
  return std::sqrt(pooled / within);
}

double geweke_z(std::span<const double> x, double first_fraction, double last_fraction) {
  if (!(first_fraction > 0.0 && last_fraction > 0.0 && first_fraction + last_fraction <= 1.0)) {
    throw std::invalid_argument("geweke_z: invalid window fractions");
  }
  const auto n = x.size();
  const auto n_first = static_cast<std::size_t>(std::floor(first_fraction * static_cast<double>(n)));
  const auto n_last = static_cast<std::size_t>(std::floor(last_fraction * static_cast<double>(n)));
  if (n_first < 4 || n_last < 4) throw std::invalid_argument("geweke_z: trace too short");
  const auto first = x.subspan(0, n_first);
  const auto last = x.subspan(n - n_last, n_last);
  const double se2 = sample_variance(first) / effective_sample_size(first) +
                     sample_variance(last) / effective_sample_size(last);
  if (se2 <= 0.0) return 0.0;
  return (sample_mean(first) - sample_mean(last)) / std::sqrt(se2);
}

}  // namespace mwg
