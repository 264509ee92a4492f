#include <doctest.h>

#include <cmath>

#include "mwg/gaussian_model.hpp"
#include "mwg/target.hpp"
#include "oracles/gaussian.hpp"

using namespace mwg;

namespace {

GaussianModelSpec simulated_spec(std::size_t n, std::uint64_t seed) {
  GaussianModelSpec spec{default_gaussian_cov(), Eigen::Vector2d::Zero(), 10.0, {}};
  if (n > 0) spec.data = simulate_gaussian_data(spec, Eigen::Vector2d(6.0, 4.0), n, key_from_seed(seed));
  return spec;
}

std::vector<oracle::Vec2> rows(const Eigen::MatrixX2d& data) {
  std::vector<oracle::Vec2> out;
  for (Eigen::Index i = 0; i < data.rows(); ++i) out.push_back({data(i, 0), data(i, 1)});
  return out;
}

const oracle::Mat2 kCov{{{1.5, 0.3}, {0.7, 0.8}}};

}  // namespace

TEST_CASE("effective covariance symmetrizes the printed matrix") {
  GaussianModelSpec spec{default_gaussian_cov(), Eigen::Vector2d::Zero(), 10.0, {}};
  const auto s = spec.effective_cov();
  CHECK(s(0, 1) == doctest::Approx(0.5));
  CHECK(s(1, 0) == s(0, 1));
  CHECK(s(0, 0) == 1.5);
}

TEST_CASE("gaussian target matches the per-point MVN oracle") {
  const auto spec = simulated_spec(250, 11);
  const auto target = gaussian_mean_target(spec);
  const auto data = rows(spec.data);
  for (const auto& [x, y] : {std::pair{6.0, 4.0}, {0.0, 0.0}, {5.7, 4.4}, {-20.0, 13.0}}) {
    const double expected = oracle::log_posterior(data, kCov, {x, y}, {0.0, 0.0}, 10.0);
    CHECK(target(gaussian_position(x, y)) == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("gaussian target rejects bad specs and positions") {
  GaussianModelSpec bad{Eigen::Matrix2d::Identity() * -1.0, Eigen::Vector2d::Zero(), 10.0, {}};
  CHECK_THROWS_AS(gaussian_mean_target(bad), std::invalid_argument);
  GaussianModelSpec zero_prior{default_gaussian_cov(), Eigen::Vector2d::Zero(), 0.0, {}};
  CHECK_THROWS_AS(gaussian_mean_target(zero_prior), std::invalid_argument);
  const auto target = gaussian_mean_target(simulated_spec(10, 1));
  CHECK_THROWS_AS(target(Position{{"mu_x", Tensor::scalar(1.0)}}), std::invalid_argument);
  CHECK(target(gaussian_position(NAN, 0.0)) == -INFINITY);
  // Entry order does not matter for evaluation.
  const Position swapped{{"mu_y", Tensor::scalar(4.0)}, {"mu_x", Tensor::scalar(6.0)}};
  CHECK(target(swapped) == target(gaussian_position(6.0, 4.0)));
}

TEST_CASE("conjugate posterior matches the closed-form oracle") {
  for (std::size_t n : {0u, 1u, 1000u}) {
    const auto spec = simulated_spec(n, 12);
    const auto post = conjugate_posterior(spec);
    const auto ref = oracle::conjugate(rows(spec.data), kCov, {0.0, 0.0}, 10.0);
    for (int a = 0; a < 2; ++a) {
      CHECK(post.mean(a) == doctest::Approx(ref.mean[a]).epsilon(1e-12));
      for (int b = 0; b < 2; ++b) {
        CHECK(post.cov(a, b) == doctest::Approx(ref.cov[a][b]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("simulated data moments approach the truth") {
  const auto spec = simulated_spec(20000, 13);
  const Eigen::Vector2d mean = spec.data.colwise().mean();
  CHECK(std::abs(mean(0) - 6.0) < 4.0 * std::sqrt(1.5 / 20000.0));
  CHECK(std::abs(mean(1) - 4.0) < 4.0 * std::sqrt(0.8 / 20000.0));
  const Eigen::MatrixX2d centred = spec.data.rowwise() - mean.transpose();
  const Eigen::Matrix2d cov = centred.transpose() * centred / 19999.0;
  CHECK(cov(0, 1) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("condition evaluates the joint at the merged position") {
  const auto target = gaussian_mean_target(simulated_spec(100, 14));
  const Position fixed{{"mu_y", Tensor::scalar(3.9)}};
  const auto conditional = condition(target, fixed);
  CHECK(conditional.declared().names() == std::vector<std::string>{"mu_x"});
  for (double x : {5.5, 6.0, 6.25}) {
    const double a = conditional(Position{{"mu_x", Tensor::scalar(x)}});
    const double b = target(gaussian_position(x, 3.9));
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
  }
  CHECK_THROWS_AS(condition(target, Position{{"nope", Tensor::scalar(0.0)}}), KeyError);
  CHECK_THROWS_AS(condition(target, gaussian_position(1.0, 2.0)), std::invalid_argument);
  CHECK_THROWS_AS(condition(target, Position{{"mu_y", Tensor::vector({1.0, 2.0})}}),
                  std::invalid_argument);
  // Conditioning on nothing leaves the target unchanged.
  const auto same = condition(target, Position{});
  CHECK(same(gaussian_position(1.0, 2.0)) == target(gaussian_position(1.0, 2.0)));
}
