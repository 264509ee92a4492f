#pragma once

// Test-side statistics: batch moments, KS against a normal, chi-square.

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace oracle {

/// Two-pass population covariance of row vectors.
inline std::vector<std::vector<double>> batch_covariance(const std::vector<std::vector<double>>& rows) {
  const std::size_t d = rows.front().size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) mean[k] += r[k];
  }
  for (auto& v : mean) v /= n;
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto& r : rows) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov[a][b] += (r[a] - mean[a]) * (r[b] - mean[b]);
    }
  }
  for (auto& row : cov) {
    for (auto& v : row) v /= n;
  }
  return cov;
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc((mean - x) / (sd * std::sqrt(2.0)));
}

inline double ks_statistic(std::vector<double> x, double mean, double sd) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i], mean, sd);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

/// P(D > d) for the one-sample KS statistic, Stephens' small-sample
/// correction to the Kolmogorov limit.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Upper-tail probability of a chi-square statistic.
inline double chi_square_p_value(double statistic, double dof) {
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), statistic));
}

}  // namespace oracle

namespace oracle {

inline double binomial_log_pmf_for_test(std::int64_t n, std::int64_t k, double p) {
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
         k * std::log(p) + (n - k) * std::log1p(-p);
}

}  // namespace oracle
