#include "mwg/gaussian_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mwg {
namespace {

Eigen::Matrix2d checked_inverse(const Eigen::Matrix2d& m, const char* what) {
  Eigen::FullPivLU<Eigen::Matrix2d> lu(m);
  if (!lu.isInvertible()) throw std::invalid_argument(std::string(what) + " is singular");
  return lu.inverse();
}

double log_normal(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

Eigen::Matrix2d GaussianModelSpec::effective_cov() const {
  return 0.5 * (true_cov + true_cov.transpose());
}

Eigen::Matrix2d default_gaussian_cov() {
  Eigen::Matrix2d cov;
  cov << 1.5, 0.3, 0.7, 0.8;
  return cov;
}

Position gaussian_position(double mu_x, double mu_y) {
  return Position{{"mu_x", Tensor::scalar(mu_x)}, {"mu_y", Tensor::scalar(mu_y)}};
}

TargetLogDensity gaussian_mean_target(const GaussianModelSpec& spec) {
  const Eigen::Matrix2d cov = spec.effective_cov();
  Eigen::LLT<Eigen::Matrix2d> llt(cov);
  if (llt.info() != Eigen::Success || !(cov.determinant() > 0.0)) {
    throw std::invalid_argument("gaussian model: effective covariance is not positive-definite");
  }
  if (!(spec.prior_scale > 0.0)) {
    throw std::invalid_argument("gaussian model: prior scale must be positive");
  }

  const Eigen::Matrix2d precision = llt.solve(Eigen::Matrix2d::Identity());
  const double n = static_cast<double>(spec.data.rows());
  const Eigen::Matrix2d& l = llt.matrixL();
  const double log_det = 2.0 * (std::log(l(0, 0)) + std::log(l(1, 1)));

  // Sum of quadratic forms split about the sample mean:
  //   sum_k q(x_k - mu) = sum_k q(x_k - xbar) + n q(xbar - mu).
  Eigen::Vector2d xbar = Eigen::Vector2d::Zero();
  double scatter = 0.0;
  if (n > 0) {
    xbar = spec.data.colwise().mean().transpose();
    const Eigen::MatrixX2d centred = spec.data.rowwise() - xbar.transpose();
    scatter = (centred * precision).cwiseProduct(centred).sum();
  }
  const double constant =
      -0.5 * n * (2.0 * std::log(2.0 * std::numbers::pi) + log_det) - 0.5 * scatter;

  const Eigen::Vector2d prior_mean = spec.prior_mean;
  const double prior_scale = spec.prior_scale;
  return TargetLogDensity(
      gaussian_position(0.0, 0.0), [=](const Position& position) {
        const double mu_x = position.at("mu_x").item();
        const double mu_y = position.at("mu_y").item();
        const Eigen::Vector2d diff = xbar - Eigen::Vector2d(mu_x, mu_y);
        const double log_lik = constant - 0.5 * n * diff.dot(precision * diff);
        const double log_prior = log_normal(mu_x, prior_mean(0), prior_scale) +
                                 log_normal(mu_y, prior_mean(1), prior_scale);
        const double value = log_lik + log_prior;
        return std::isnan(value) ? -std::numeric_limits<double>::infinity() : value;
      });
}

Eigen::MatrixX2d simulate_gaussian_data(const GaussianModelSpec& spec,
                                        const Eigen::Vector2d& true_mean, std::size_t n,
                                        const RngKey& key) {
  if (n == 0) throw std::invalid_argument("simulate_gaussian_data: n must be positive");
  Eigen::LLT<Eigen::Matrix2d> llt(spec.effective_cov());
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("simulate_gaussian_data: covariance is not positive-definite");
  }
  const Eigen::Matrix2d l = llt.matrixL();
  RandomStream stream(key);
  Eigen::MatrixX2d out(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index row = 0; row < out.rows(); ++row) {
    const double z0 = stream.next_normal();
    const double z1 = stream.next_normal();
    out.row(row) = (true_mean + l * Eigen::Vector2d(z0, z1)).transpose();
  }
  return out;
}

GaussianPosterior conjugate_posterior(const GaussianModelSpec& spec) {
  const Eigen::Matrix2d prior_cov =
      spec.prior_scale * spec.prior_scale * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d prior_precision = checked_inverse(prior_cov, "prior covariance");
  const auto n = static_cast<double>(spec.data.rows());
  if (n == 0) return {spec.prior_mean, prior_cov};

  const Eigen::Matrix2d data_precision = checked_inverse(spec.effective_cov(), "covariance");
  const Eigen::Vector2d xbar = spec.data.colwise().mean().transpose();
  const Eigen::Matrix2d post_cov =
      checked_inverse(prior_precision + n * data_precision, "posterior precision");
  const Eigen::Vector2d post_mean =
      post_cov * (prior_precision * spec.prior_mean + n * data_precision * xbar);
  return {post_mean, post_cov};
}

}  // namespace mwg
