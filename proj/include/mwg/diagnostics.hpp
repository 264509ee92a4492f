#pragma once

#include <span>
#include <vector>

namespace mwg {

double sample_mean(std::span<const double> x);
/// Unbiased (n - 1) sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> x);

/// Linear-interpolation quantile on sorted data (position (n - 1) * p).
double quantile_sorted(std::span<const double> sorted, double p);

/// Effective sample size by Geyer's initial positive sequence: pairs of
/// lag autocorrelations are summed while their sum stays positive. A
/// zero-variance trace has ESS 1. The result lies in (0, n].
double effective_sample_size(std::span<const double> x);

/// Potential scale reduction across chains of equal length (>= 2 chains).
double gelman_rubin(const std::vector<std::vector<double>>& chains);

/// Geweke-style z-score comparing the mean of the first `first_fraction`
/// of the trace with the mean of the last `last_fraction`, each with an
/// ESS-based standard error.
double geweke_z(std::span<const double> x, double first_fraction = 0.1,
                double last_fraction = 0.5);

}  // namespace mwg
