#pragma once

#include <Eigen/Dense>

#include "mwg/prng.hpp"
#include "mwg/target.hpp"

namespace mwg {

/// Bivariate normal observations with unknown mean and known covariance,
/// independent N(prior_mean_k, prior_scale^2) priors on each mean component.
///
/// Parameters are named `mu_x` and `mu_y` (scalars).
struct GaussianModelSpec {
  /// Covariance as supplied. Need not be symmetric; see effective_cov().
  Eigen::Matrix2d true_cov;
  Eigen::Vector2d prior_mean = Eigen::Vector2d::Zero();
  /// Prior standard deviation.
  double prior_scale = 10.0;
  /// n x 2 observations.
  Eigen::MatrixX2d data = Eigen::MatrixX2d(0, 2);

  /// (true_cov + true_cov^T) / 2.
  Eigen::Matrix2d effective_cov() const;
};

/// Default covariance of the two-dimensional example. It is not symmetric;
/// the model uses effective_cov().
Eigen::Matrix2d default_gaussian_cov();

/// Throws std::invalid_argument if the effective covariance is not
/// positive-definite or the prior scale is not positive.
TargetLogDensity gaussian_mean_target(const GaussianModelSpec& spec);

/// n i.i.d. draws from MVN(true_mean, effective_cov()). Ignores spec.data.
Eigen::MatrixX2d simulate_gaussian_data(const GaussianModelSpec& spec,
                                        const Eigen::Vector2d& true_mean, std::size_t n,
                                        const RngKey& key);

struct GaussianPosterior {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

/// Exact posterior of the mean given the data (known covariance).
GaussianPosterior conjugate_posterior(const GaussianModelSpec& spec);

Position gaussian_position(double mu_x, double mu_y);

}  // namespace mwg
