#include "mwg/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <ostream>
#include <thread>
#include <chrono>

#include "mwg/cli/io.hpp"
#include "mwg/diagnostics.hpp"
#include "mwg/driver.hpp"
#include "mwg/kernels.hpp"

namespace mwg::cli {
namespace {

using nlohmann::json;

struct Keys {
  RngKey data;
  std::vector<RngKey> chains;
};

// Data simulation and the chains draw from disjoint halves of the root key.
Keys derive_keys(std::uint64_t seed, std::size_t chains) {
  const auto parts = split(key_from_seed(seed), 2);
  return Keys{parts[0], chains == 1 ? std::vector<RngKey>{parts[1]} : split(parts[1], chains)};
}

std::vector<McmcRun> run_chains(std::size_t num_samples, const SamplingAlgorithm& algorithm,
                                const TargetLogDensity& target, const Position& initial,
                                const std::vector<RngKey>& keys) {
  std::vector<McmcRun> runs(keys.size());
  if (keys.size() == 1) {
    runs[0] = mcmc(num_samples, algorithm, target, initial, keys[0]);
    return runs;
  }
  std::vector<std::exception_ptr> errors(keys.size());
  std::vector<std::thread> workers;
  for (std::size_t c = 0; c < keys.size(); ++c) {
    workers.emplace_back([&, c] {
      try {
        runs[c] = mcmc(num_samples, algorithm, target, initial, keys[c]);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

std::filesystem::path chain_file(const ExperimentConfig& config, const std::string& stem,
                                 std::size_t chain) {
  const auto name =
      config.chains == 1 ? stem + ".csv" : stem + "-" + std::to_string(chain) + ".csv";
  return config.output_dir / name;
}

json summary_json(const std::vector<ParameterSummary>& summaries) {
  json out = json::array();
  for (const auto& s : summaries) {
    out.push_back({{"label", s.label},
                   {"mean", s.mean},
                   {"sd", s.sd},
                   {"q025", s.q025},
                   {"q50", s.q50},
                   {"q975", s.q975},
                   {"ess", s.ess}});
  }
  return out;
}

/// Gelman-Rubin per flattened real column over rows [burn_in, n).
json r_hat_json(const std::vector<McmcRun>& runs, std::size_t burn_in,
                const std::vector<std::string>& names) {
  json out = json::object();
  for (const auto& name : names) {
    std::vector<std::vector<double>> chains;
    for (const auto& run : runs) {
      const auto column = run.samples.column(name);
      chains.emplace_back(column.begin() + static_cast<std::ptrdiff_t>(burn_in), column.end());
    }
    out[name] = gelman_rubin(chains);
  }
  return out;
}

json base_summary(const ExperimentConfig& config, double wall_seconds) {
  return json{{"version", library_version()},
              {"config", to_json(config)},
              {"seed", config.seed},
              {"wall_seconds", wall_seconds}};
}

double total_wall(const std::vector<McmcRun>& runs) {
  double wall = 0.0;
  for (const auto& r : runs) wall = std::max(wall, r.meta.wall_seconds);
  return wall;
}

void write_json(const std::filesystem::path& path, const json& value) {
  write_file_atomic(path, value.dump(2) + "\n");
}

double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

/// One-sample Kolmogorov-Smirnov distance against N(mean, sd^2).
double ks_statistic(std::vector<double> x, double mean, double sd) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = normal_cdf(x[i], mean, sd);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

struct GaussianSetup {
  GaussianModelSpec spec;
  TargetLogDensity target;
  GaussianPosterior oracle;
};

GaussianSetup gaussian_setup(const ExperimentConfig& config, const RngKey& data_key) {
  const auto& g = config.gaussian;
  GaussianModelSpec spec{g.true_cov, g.prior_mean, g.prior_scale, {}};
  spec.data = simulate_gaussian_data(spec, g.true_mean, g.num_data, data_key);
  auto target = gaussian_mean_target(spec);
  return GaussianSetup{spec, target, conjugate_posterior(spec)};
}

json oracle_json(const GaussianPosterior& oracle) {
  return {{"mean", {oracle.mean(0), oracle.mean(1)}},
          {"sd", {std::sqrt(oracle.cov(0, 0)), std::sqrt(oracle.cov(1, 1))}},
          {"cov", {{oracle.cov(0, 0), oracle.cov(0, 1)}, {oracle.cov(1, 0), oracle.cov(1, 1)}}}};
}

void write_density_grid(const ExperimentConfig& config, const GaussianSetup& setup) {
  const std::size_t n = config.gaussian.grid_points;
  const double span = 5.0;
  const double sx = std::sqrt(setup.oracle.cov(0, 0));
  const double sy = std::sqrt(setup.oracle.cov(1, 1));
  std::string out = "mu_x,mu_y,log_density\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x = setup.oracle.mean(0) + sx * span * (2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double y = setup.oracle.mean(1) + sy * span * (2.0 * static_cast<double>(j) / static_cast<double>(n - 1) - 1.0);
      out += format_double(x) + "," + format_double(y) + "," +
             format_double(setup.target(gaussian_position(x, y))) + "\n";
    }
  }
  write_file_atomic(config.output_dir / "density-grid.csv", out);
}

json run_gaussian(const ExperimentConfig& config, const SamplingAlgorithm& algorithm,
                  std::ostream& log, const std::function<void(json&, const McmcRun&)>& extra) {
  const auto keys = derive_keys(config.seed, config.chains);
  const auto setup = gaussian_setup(config, keys.data);
  const auto& g = config.gaussian;
  log << experiment_name(config.experiment) << ": " << config.chains << " chain(s) x "
      << config.num_samples << " samples\n";
  const auto runs =
      run_chains(config.num_samples, algorithm, setup.target,
                 gaussian_position(g.initial_position(0), g.initial_position(1)), keys.chains);

  json summary = base_summary(config, total_wall(runs));
  summary["oracle"] = oracle_json(setup.oracle);
  json chains = json::array();
  for (std::size_t c = 0; c < runs.size(); ++c) {
    write_file_atomic(chain_file(config, "trace", c), trace_csv(runs[c].samples));
    const auto summaries = summarize(runs[c], g.burn_in);
    json chain{{"parameters", summary_json(summaries)},
               {"acceptance_rates", acceptance_rate(runs[c].infos, g.burn_in)}};
    json within = json::array();
    for (std::size_t k = 0; k < 2; ++k) {
      within.push_back(std::abs(summaries[k].mean - setup.oracle.mean(static_cast<Eigen::Index>(k))) <=
                       3.0 * std::sqrt(setup.oracle.cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k))));
    }
    chain["mean_within_3_oracle_sd"] = within;
    extra(chain, runs[c]);
    chains.push_back(chain);
  }
  summary["chains"] = chains;
  if (runs.size() > 1) summary["r_hat"] = r_hat_json(runs, g.burn_in, {"mu_x", "mu_y"});
  write_density_grid(config, setup);
  write_json(config.output_dir / "summary.json", summary);
  return summary;
}

sir::EventTensor events_from_rows(const ExperimentConfig& config,
                             const std::vector<std::vector<std::int64_t>>& rows,
                             const std::filesystem::path& source) {
  const auto& model = config.sir.model;
  sir::EventTensor events(model.num_times, model.num_pops());
  std::vector<bool> seen(model.num_times * model.num_pops(), false);
  for (const auto& row : rows) {
    const auto t = row[0], pop = row[1];
    if (t < 0 || pop < 0 || static_cast<std::size_t>(t) >= model.num_times ||
        static_cast<std::size_t>(pop) >= model.num_pops()) {
      throw std::runtime_error(source.string() + ": block (" + std::to_string(t) + ", " +
                               std::to_string(pop) + ") is outside the configured model");
    }
    const auto cell = static_cast<std::size_t>(t) * model.num_pops() + static_cast<std::size_t>(pop);
    if (seen[cell]) {
      throw std::runtime_error(source.string() + ": block (" + std::to_string(t) + ", " +
                               std::to_string(pop) + ") appears twice");
    }
    seen[cell] = true;
    events(static_cast<std::size_t>(t), static_cast<std::size_t>(pop), sir::kSI) = row[2];
    events(static_cast<std::size_t>(t), static_cast<std::size_t>(pop), sir::kIR) = row[3];
  }
  return events;
}

std::string events_csv(const sir::EventTensor& events) {
  std::vector<std::vector<std::int64_t>> rows;
  for (std::size_t t = 0; t < events.num_times(); ++t) {
    for (std::size_t i = 0; i < events.num_pops(); ++i) {
      rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(i),
                      events(t, i, sir::kSI), events(t, i, sir::kIR)});
    }
  }
  return integer_table_csv({"t", "pop", "si", "ir"}, rows);
}

}  // namespace

const char* library_version() { return MWG_VERSION; }

nlohmann::json run_gaussian_mwg(const ExperimentConfig& config, std::ostream& log) {
  const auto& g = config.gaussian;
  const auto algorithm = mwg_step(rwmh(g.rwmh_scale), {"mu_x"}) >>
                         mwg_step(adaptive_rwmh(g.adaptive_initial_scale), {"mu_y"});
  return run_gaussian(config, algorithm, log, [](json&, const McmcRun&) {});
}

nlohmann::json run_metropolis_demo(const ExperimentConfig& config, std::ostream& log) {
  const auto& g = config.gaussian;
  GaussianPosterior oracle;
  {
    const auto keys = derive_keys(config.seed, 1);
    oracle = gaussian_setup(config, keys.data).oracle;
  }
  auto ks = [&](json& chain, const McmcRun& run) {
    json tests = json::object();
    const std::vector<std::string> names{"mu_x", "mu_y"};
    for (std::size_t k = 0; k < names.size(); ++k) {
      const auto column = run.samples.column(names[k]);
      std::vector<double> thinned;
      for (std::size_t i = g.burn_in; i < column.size(); i += g.thin) thinned.push_back(column[i]);
      const auto kk = static_cast<Eigen::Index>(k);
      const double d = ks_statistic(thinned, oracle.mean(kk), std::sqrt(oracle.cov(kk, kk)));
      // Asymptotic two-sided critical value at alpha = 0.01.
      const double critical = 1.6276 / std::sqrt(static_cast<double>(thinned.size()));
      tests[names[k]] = {{"statistic", d},
                         {"num_thinned", thinned.size()},
                         {"critical_value_alpha_0.01", critical},
                         {"passes", d < critical}};
    }
    chain["ks"] = tests;
  };
  return run_gaussian(config, metropolis(g.metropolis_tau), log, ks);
}

nlohmann::json run_sir_simulate(const ExperimentConfig& config, std::ostream& log) {
  const auto& s = config.sir;
  const auto started = std::chrono::steady_clock::now();
  const auto keys = derive_keys(config.seed, 1);
  const auto events = sir::simulate(s.model, s.true_params, s.initial_state, keys.data);
  const auto trajectory = sir::state_trajectory(s.model, s.initial_state, events);
  if (!trajectory) throw std::logic_error("simulated events are infeasible");

  std::vector<std::vector<std::int64_t>> rows;
  for (std::size_t t = 0; t <= trajectory->num_times; ++t) {
    for (std::size_t i = 0; i < trajectory->num_pops; ++i) {
      rows.push_back({static_cast<std::int64_t>(t), static_cast<std::int64_t>(i),
                      (*trajectory)(t, i, sir::kS), (*trajectory)(t, i, sir::kI),
                      (*trajectory)(t, i, sir::kR)});
    }
  }
  write_file_atomic(config.output_dir / "events.csv", events_csv(events));
  write_file_atomic(config.output_dir / "trajectory.csv",
                    integer_table_csv({"t", "pop", "S", "I", "R"}, rows));

  json infected = json::array();
  for (std::size_t i = 0; i < s.model.num_pops(); ++i) {
    std::int64_t total = 0;
    for (std::size_t t = 0; t < s.model.num_times; ++t) total += events(t, i, sir::kSI);
    infected.push_back(total);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json summary = base_summary(config, wall);
  summary["total_infections"] = infected;
  write_json(config.output_dir / "summary.json", summary);
  log << "sir-simulate: wrote events.csv and trajectory.csv to " << config.output_dir.string()
      << "\n";
  return summary;
}

nlohmann::json run_sir_fit(const ExperimentConfig& config, std::ostream& log) {
  const auto& s = config.sir;
  const auto keys = derive_keys(config.seed, config.chains);
  sir::EventTensor observed;
  std::optional<sir::EventTensor> simulated;
  if (s.events_file) {
    const auto rows = read_integer_csv(*s.events_file, {"t", "pop", "si", "ir"});
    observed = events_from_rows(config, rows, *s.events_file);
  } else {
    simulated = sir::simulate(s.model, s.true_params, s.initial_state, keys.data);
    observed = *simulated;
  }
  // Only removals are observed; infections are latent and re-imputed.
  const auto imputed = sir::impute_infections(s.model, s.initial_state, observed);

  const auto target = sir::sir_target(s.model, s.initial_state);
  const auto algorithm = sir::build_sir_mwg(s.model, s.param_kernel_scale, s.num_da_scans);
  log << "sir-fit: " << config.chains << " chain(s) x " << config.num_samples << " samples\n";
  const auto runs = run_chains(config.num_samples, algorithm, target,
                               sir::sir_position(s.initial_params, imputed), keys.chains);

  json summary = base_summary(config, total_wall(runs));
  if (simulated) summary["true_params"] = {{"beta1", s.true_params.beta1}, {"beta2", s.true_params.beta2}};
  json chains = json::array();
  const std::size_t m = s.model.num_pops();
  for (std::size_t c = 0; c < runs.size(); ++c) {
    const auto& run = runs[c];
    const auto beta1 = run.samples.column("beta1");
    const auto beta2 = run.samples.column("beta2");
    std::string trace = "iteration,beta1,beta2\n";
    for (std::size_t i = 0; i < beta1.size(); ++i) {
      trace += std::to_string(i) + "," + format_double(beta1[i]) + "," + format_double(beta2[i]) + "\n";
    }
    write_file_atomic(chain_file(config, "beta-trace", c), trace);

    std::string posterior = simulated ? "t,pop,mean_si,observed_ir,true_si\n"
                                      : "t,pop,mean_si,observed_ir\n";
    for (std::size_t t = 0; t < s.model.num_times; ++t) {
      for (std::size_t i = 0; i < m; ++i) {
        const auto column = run.samples.column("events", (t * m + i) * 2 + sir::kSI);
        const std::span<const double> kept(column.begin() + static_cast<std::ptrdiff_t>(s.burn_in),
                                           column.end());
        posterior += std::to_string(t) + "," + std::to_string(i) + "," +
                     format_double(sample_mean(kept)) + "," +
                     std::to_string(observed(t, i, sir::kIR));
        if (simulated) posterior += "," + std::to_string((*simulated)(t, i, sir::kSI));
        posterior += "\n";
      }
    }
    write_file_atomic(chain_file(config, "event-posterior", c), posterior);

    json parameters = json::array();
    for (const auto& [name, column] : {std::pair{"beta1", beta1}, std::pair{"beta2", beta2}}) {
      std::vector<double> kept(column.begin() + static_cast<std::ptrdiff_t>(s.burn_in), column.end());
      json p{{"label", name},
             {"mean", sample_mean(kept)},
             {"sd", std::sqrt(sample_variance(kept))},
             {"ess", effective_sample_size(kept)},
             {"geweke_z", geweke_z(kept)}};
      std::sort(kept.begin(), kept.end());
      p["q025"] = quantile_sorted(kept, 0.025);
      p["q50"] = quantile_sorted(kept, 0.5);
      p["q975"] = quantile_sorted(kept, 0.975);
      if (simulated) {
        const double truth = std::string(name) == "beta1" ? s.true_params.beta1 : s.true_params.beta2;
        p["truth_in_95_interval"] = truth >= p["q025"].get<double>() && truth <= p["q975"].get<double>();
      }
      parameters.push_back(p);
    }
    chains.push_back({{"parameters", parameters},
                      {"acceptance_rates", acceptance_rate(run.infos, s.burn_in)}});
  }
  summary["chains"] = chains;
  if (runs.size() > 1) summary["r_hat"] = r_hat_json(runs, s.burn_in, {"beta1", "beta2"});
  write_json(config.output_dir / "summary.json", summary);
  return summary;
}

nlohmann::json run_experiment(const ExperimentConfig& config, std::ostream& log) {
  switch (config.experiment) {
    case Experiment::gaussian_mwg: return run_gaussian_mwg(config, log);
    case Experiment::metropolis_demo: return run_metropolis_demo(config, log);
    case Experiment::sir_simulate: return run_sir_simulate(config, log);
    case Experiment::sir_fit: return run_sir_fit(config, log);
  }
  throw std::logic_error("unhandled experiment");
}

}  // namespace mwg::cli
