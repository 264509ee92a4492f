#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "mwg/epi_sir.hpp"
#include "mwg/gaussian_model.hpp"

namespace mwg::cli {

enum class Experiment { gaussian_mwg, metropolis_demo, sir_simulate, sir_fit };

std::string experiment_name(Experiment experiment);
/// Throws ConfigError for unknown names.
Experiment parse_experiment(const std::string& name);

/// Invalid or unreadable configuration. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GaussianSettings {
  Eigen::Matrix2d true_cov = default_gaussian_cov();
  Eigen::Vector2d true_mean{6.0, 4.0};
  std::size_t num_data = 1000;
  Eigen::Vector2d prior_mean = Eigen::Vector2d::Zero();
  double prior_scale = 10.0;
  Eigen::Vector2d initial_position = Eigen::Vector2d::Zero();
  double rwmh_scale = 1.8;
  double adaptive_initial_scale = 1.0;
  double metropolis_tau = 0.085;
  std::size_t burn_in = 2000;
  std::size_t thin = 50;
  std::size_t grid_points = 101;
};

struct SirSettings {
  sir::MetaPopConfig model;
  sir::InitialState initial_state;
  sir::EpiParams true_params{0.5, 0.05};
  sir::EpiParams initial_params{0.3, 0.03};
  /// Events to fit; when absent, sir-fit simulates them from true_params.
  std::optional<std::filesystem::path> events_file;
  double param_kernel_scale = 0.1;
  std::size_t num_da_scans = 50;
  std::size_t burn_in = 5000;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::gaussian_mwg;
  std::uint64_t seed = 0;
  std::size_t num_samples = 10000;
  std::filesystem::path output_dir = "out";
  std::size_t chains = 1;
  GaussianSettings gaussian;
  SirSettings sir;
};

/// Strict parse: unknown fields, wrong types and out-of-range values throw
/// ConfigError naming the offending field. Relative events_file paths are
/// resolved against `base_dir`. A present "experiment" field must match.
ExperimentConfig parse_config(const nlohmann::json& document, Experiment experiment,
                              const std::filesystem::path& base_dir = {});

ExperimentConfig load_config(const std::filesystem::path& path, Experiment experiment);

/// Fully resolved configuration, including defaults.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace mwg::cli
