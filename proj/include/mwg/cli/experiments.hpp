#pragma once

#include <iosfwd>

#include <json.hpp>

#include "mwg/cli/config.hpp"

namespace mwg::cli {

/// Runs the configured experiment and writes its artifacts under
/// config.output_dir. Returns the summary that was written to summary.json.
nlohmann::json run_experiment(const ExperimentConfig& config, std::ostream& log);

nlohmann::json run_gaussian_mwg(const ExperimentConfig& config, std::ostream& log);
nlohmann::json run_metropolis_demo(const ExperimentConfig& config, std::ostream& log);
nlohmann::json run_sir_simulate(const ExperimentConfig& config, std::ostream& log);
nlohmann::json run_sir_fit(const ExperimentConfig& config, std::ostream& log);

/// Library version recorded in every summary.
const char* library_version();

}  // namespace mwg::cli
