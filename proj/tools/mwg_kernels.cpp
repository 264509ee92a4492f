#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mwg/cli/config.hpp"
#include "mwg/cli/experiments.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composable MCMC kernels: run the bundled experiments"};
  app.set_version_flag("--version", std::string(mwg::cli::library_version()));

  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> num_samples;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> chains;

  app.add_option("experiment", experiment,
                 "gaussian-mwg | metropolis-demo | sir-simulate | sir-fit")
      ->required();
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--seed", seed, "Override the root seed");
  app.add_option("--num-samples", num_samples, "Override the number of MCMC iterations");
  app.add_option("--output-dir", output_dir, "Override the artifact directory");
  app.add_option("--chains", chains, "Independent chains on worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  mwg::cli::ExperimentConfig config;
  try {
    config = mwg::cli::load_config(config_path, mwg::cli::parse_experiment(experiment));
    if (seed) config.seed = *seed;
    if (num_samples) {
      if (*num_samples == 0) throw mwg::cli::ConfigError("--num-samples must be positive");
      config.num_samples = *num_samples;
    }
    if (output_dir) config.output_dir = *output_dir;
    if (chains) {
      if (*chains == 0) throw mwg::cli::ConfigError("--chains must be positive");
      config.chains = *chains;
    }
    const std::size_t burn_in = config.experiment == mwg::cli::Experiment::sir_fit
                                    ? config.sir.burn_in
                                    : config.gaussian.burn_in;
    if (config.experiment != mwg::cli::Experiment::sir_simulate && burn_in >= config.num_samples) {
      throw mwg::cli::ConfigError("burn-in (" + std::to_string(burn_in) +
                                  ") must be less than the number of samples");
    }
  } catch (const mwg::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    mwg::cli::run_experiment(config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
