// Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mwg/cli/config.hpp"
#include "mwg/cli/experiments.hpp"
#include "mwg/cli/io.hpp"
#include "mwg/diagnostics.hpp"
#include "mwg/driver.hpp"
#include "mwg/epi_sir.hpp"
#include "mwg/gaussian_model.hpp"
#include "mwg/kernels.hpp"
#include "oracles/gaussian.hpp"
#include "oracles/sir_enumeration.hpp"
#include "oracles/stats.hpp"

using namespace mwg;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("mwg-acceptance-" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Columns of a numeric CSV with a header row, keyed by header label.
std::map<std::string, std::vector<double>> read_columns(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> labels;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) labels.push_back(cell);
  }
  std::map<std::string, std::vector<double>> columns;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; std::getline(ss, cell, ','); ++c) {
      double value = 0.0;
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
      columns[labels.at(c)].push_back(value);
    }
  }
  return columns;
}

cli::ExperimentConfig shipped(const std::string& file, cli::Experiment experiment) {
  return cli::load_config(std::filesystem::path(MWG_CONFIG_DIR) / file, experiment);
}

/// Data of a Gaussian experiment, regenerated from the experiment's data key.
std::vector<oracle::Vec2> gaussian_data(const cli::ExperimentConfig& config) {
  const auto& g = config.gaussian;
  GaussianModelSpec spec{g.true_cov, g.prior_mean, g.prior_scale, {}};
  const auto data_key = split(key_from_seed(config.seed), 2)[0];
  const auto data = simulate_gaussian_data(spec, g.true_mean, g.num_data, data_key);
  std::vector<oracle::Vec2> rows;
  for (Eigen::Index i = 0; i < data.rows(); ++i) rows.push_back({data(i, 0), data(i, 1)});
  return rows;
}

oracle::Posterior gaussian_oracle(const cli::ExperimentConfig& config) {
  const auto& g = config.gaussian;
  const oracle::Mat2 cov{{{g.true_cov(0, 0), g.true_cov(0, 1)}, {g.true_cov(1, 0), g.true_cov(1, 1)}}};
  return oracle::conjugate(gaussian_data(config), cov, {g.prior_mean(0), g.prior_mean(1)},
                           g.prior_scale);
}

TargetLogDensity gaussian_target_for(const cli::ExperimentConfig& config) {
  const auto& g = config.gaussian;
  GaussianModelSpec spec{g.true_cov, g.prior_mean, g.prior_scale, {}};
  spec.data = simulate_gaussian_data(spec, g.true_mean, g.num_data,
                                     split(key_from_seed(config.seed), 2)[0]);
  return gaussian_mean_target(spec);
}

SamplingAlgorithm gaussian_mwg(const cli::ExperimentConfig& config) {
  return mwg_step(rwmh(config.gaussian.rwmh_scale), {"mu_x"}) >>
         mwg_step(adaptive_rwmh(config.gaussian.adaptive_initial_scale), {"mu_y"});
}

sir::MetaPopConfig tiny_sir(std::size_t num_times) {
  sir::MetaPopConfig c;
  c.population = {4};
  c.connectivity = Eigen::MatrixXd::Constant(1, 1, 0.5);
  c.gamma = 0.3;
  c.num_times = num_times;
  c.init_window = num_times;
  return c;
}

oracle::TinySir tiny_oracle(const sir::MetaPopConfig& c, const sir::InitialState& x0,
                            const sir::EpiParams& p) {
  oracle::TinySir o;
  o.population = c.population;
  o.connectivity = {{c.connectivity(0, 0)}};
  o.gamma = c.gamma;
  o.delta_t = c.delta_t;
  o.num_times = c.num_times;
  o.x0 = x0.counts;
  o.beta1 = p.beta1;
  o.beta2 = p.beta2;
  return o;
}

Outcome likelihood_normalization() {
  const auto c = tiny_sir(2);
  const sir::InitialState x0{{3, 1, 0}};
  const sir::EpiParams p{1.1, 0.4};
  double total = 0.0;
  std::size_t histories = 0;
  bool density_split = true;
  oracle::for_each_feasible(tiny_oracle(c, x0, p), [&](const std::vector<std::int64_t>& flat) {
    const auto events = sir::EventTensor::from_tensor(Tensor(Shape{2, 1, 2}, flat));
    const double ll = sir::log_likelihood(c, p, x0, events);
    density_split = density_split &&
                    sir::log_density(c, p, x0, events) == ll + sir::log_prior(p);
    total += std::exp(ll);
    ++histories;
  });
  const double error = std::abs(total - 1.0);
  return {error <= 1e-9 && density_split,
          fmt("%zu histories, |sum - 1| = %.2e, log_density = likelihood + prior: %s", histories,
              error, density_split ? "yes" : "no")};
}

Outcome conditional_exactness() {
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t mismatches = 0;

  const auto gaussian = gaussian_target_for(shipped("gaussian-mwg.json", cli::Experiment::gaussian_mwg));
  const std::vector<std::vector<std::string>> gaussian_fixed{{"mu_x"}, {"mu_y"}};
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto position = gaussian_position(6.0 + normal(gen), 4.0 + normal(gen));
    const auto [fixed, free] = project(position, gaussian_fixed[i % 2]);
    if (!same_bits(condition(gaussian, fixed)(free), gaussian(merge(free, fixed)))) ++mismatches;
  }

  const auto sir_config = shipped("sir-fit.json", cli::Experiment::sir_fit).sir;
  const auto target = sir::sir_target(sir_config.model, sir_config.initial_state);
  const std::vector<std::vector<std::string>> sir_fixed{
      {"events"}, {"beta1", "beta2"}, {"beta2", "events"}, {"beta1"}};
  for (std::size_t i = 0; i < 1000; ++i) {
    const sir::EpiParams p{0.4 * unit(gen), 0.04 * unit(gen)};
    auto events = sir::simulate(sir_config.model, p, sir_config.initial_state,
                                fold_in(key_from_seed(31), i));
    // Every fifth history is perturbed, which may make it infeasible.
    if (i % 5 == 0) events(i % sir_config.model.num_times, i % 3, sir::kSI) += 1;
    const auto position = sir::sir_position(p, events);
    const auto [fixed, free] = project(position, sir_fixed[i % sir_fixed.size()]);
    if (!same_bits(condition(target, fixed)(free), target(merge(free, fixed)))) ++mismatches;
  }
  return {mismatches == 0, fmt("%zu of 2000 evaluations differ", mismatches)};
}

Outcome scope_isolation() {
  const auto config = shipped("gaussian-mwg.json", cli::Experiment::gaussian_mwg);
  const auto target = gaussian_target_for(config);
  const auto algorithm = gaussian_mwg(config);
  const auto parts = algorithm.components();
  if (parts.size() != 2) return {false, "composite does not have two components"};

  auto state = algorithm.init(target, gaussian_position(0.0, 0.0));
  std::size_t leaks = 0, layout_errors = 0, replay_errors = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const auto key = fold_in(key_from_seed(config.seed), i);
    const auto result = algorithm.step(target, state, key);

    const auto keys = split(key, 2);
    const auto first = parts[0].step(target, {state.chain, {state.kernel[0]}}, keys[0]);
    if (!first.state.chain.position.at("mu_y").bitwise_equal(state.chain.position.at("mu_y"))) ++leaks;
    const auto second = parts[1].step(target, {first.state.chain, {state.kernel[1]}}, keys[1]);
    if (!second.state.chain.position.at("mu_x").bitwise_equal(first.state.chain.position.at("mu_x"))) {
      ++leaks;
    }
    if (!second.state.chain.position.bitwise_equal(result.state.chain.position) ||
        !first.info.bitwise_equal(result.info[0]) || !second.info.bitwise_equal(result.info[1])) {
      ++replay_errors;
    }
    if (result.info.kind() != Info::Kind::sequence || result.info.length() != 2 ||
        result.info[0].kind() != Info::Kind::record || result.info[1].kind() != Info::Kind::record ||
        !result.info[1].record().contains("log_acceptance")) {
      ++layout_errors;
    }
    state = result.state;
  }
  return {leaks + layout_errors + replay_errors == 0,
          fmt("untargeted changes %zu, sub-step replay mismatches %zu, info layout errors %zu", leaks,
              replay_errors, layout_errors)};
}

Outcome gaussian_recovery() {
  auto config = shipped("gaussian-mwg.json", cli::Experiment::gaussian_mwg);
  config.output_dir = scratch("gaussian-mwg");
  std::ostringstream log;
  const auto started = std::chrono::steady_clock::now();
  const auto summary = cli::run_gaussian_mwg(config, log);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const auto oracle = gaussian_oracle(config);
  const auto trace = read_columns(config.output_dir / "trace.csv");
  const std::vector<std::string> names{"mu_x", "mu_y"};
  const std::vector<double> reference_rates{0.285, 0.322};
  const auto rates = summary["chains"][0]["acceptance_rates"].get<std::vector<double>>();
  bool means_ok = true, rates_ok = rates.size() == 2;
  std::string detail;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& column = trace.at(names[k]);
    const std::vector<double> kept(column.begin() + static_cast<std::ptrdiff_t>(config.gaussian.burn_in),
                                   column.end());
    const double mean = sample_mean(kept);
    const double sd = std::sqrt(oracle.cov[k][k]);
    const double z = (mean - oracle.mean[k]) / sd;
    means_ok = means_ok && std::abs(z) <= 3.0;
    const double rate = k < rates.size() ? rates[k] : NAN;
    rates_ok = rates_ok && std::abs(rate - reference_rates[k]) <= 0.10;
    detail += fmt("%s mean %.5f vs %.5f (%.2f sd), acceptance %.3f vs %.3f; ", names[k].c_str(),
                  mean, oracle.mean[k], z, rate, reference_rates[k]);
  }
  detail += fmt("means %s, acceptance band %s, runtime %.1f s", means_ok ? "ok" : "FAIL",
                rates_ok ? "ok" : "FAIL", seconds);
  return {means_ok && rates_ok && seconds < 60.0, detail};
}

Outcome metropolis_demo() {
  auto config = shipped("metropolis-demo.json", cli::Experiment::metropolis_demo);
  config.output_dir = scratch("metropolis-demo");
  std::ostringstream log;
  const auto started = std::chrono::steady_clock::now();
  cli::run_metropolis_demo(config, log);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const auto oracle = gaussian_oracle(config);
  const auto trace = read_columns(config.output_dir / "trace.csv");
  const std::vector<std::string> names{"mu_x", "mu_y"};
  bool pass = seconds < 60.0;
  std::string detail;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& column = trace.at(names[k]);
    std::vector<double> thinned;
    for (std::size_t i = config.gaussian.burn_in; i < column.size(); i += config.gaussian.thin) {
      thinned.push_back(column[i]);
    }
    const double d = oracle::ks_statistic(thinned, oracle.mean[k], std::sqrt(oracle.cov[k][k]));
    const double p = oracle::ks_p_value(d, thinned.size());
    pass = pass && p > 0.01;
    detail += fmt("%s KS D = %.4f, p = %.3f (n = %zu); ", names[k].c_str(), d, p, thinned.size());
  }
  detail += fmt("runtime %.1f s", seconds);
  return {pass, detail};
}

Outcome stationarity() {
  struct Case {
    std::string name;
    SamplingAlgorithm kernel;
    bool log_normal;
  };
  const std::vector<Case> cases{{"metropolis", metropolis(1.5), false},
                                {"rwmh", rwmh(1.0), false},
                                {"adaptive_rwmh", adaptive_rwmh(1.0), false},
                                {"on_log_scale(rwmh)", on_log_scale(rwmh(1.0)), true}};
  const TargetLogDensity normal(Position{{"x", Tensor::scalar(0.0)}}, [](const Position& p) {
    const double x = p.at("x").item();
    return -0.5 * x * x;
  });
  // log x ~ N(0, 1); the kernel runs on log x, which is a standard normal.
  const TargetLogDensity log_normal(Position{{"x", Tensor::scalar(1.0)}}, [](const Position& p) {
    const double x = p.at("x").item();
    if (!(x > 0.0)) return kNegInf;
    const double l = std::log(x);
    return -0.5 * l * l - l;
  });

  constexpr std::size_t chains = 5000;
  std::mt19937_64 gen(6);
  std::normal_distribution<double> draw(0.0, 1.0);
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto& target = c.log_normal ? log_normal : normal;
    std::vector<double> d1, d2;
    std::size_t moved = 0;
    for (std::size_t i = 0; i < chains; ++i) {
      const double z = draw(gen);
      const auto state = c.kernel.init(target, Position{{"x", Tensor::scalar(c.log_normal ? std::exp(z) : z)}});
      const auto result = c.kernel.step(target, state, fold_in(key_from_seed(66), i));
      const double after = result.state.chain.position.at("x").item();
      const double w = c.log_normal ? std::log(after) : after;
      moved += w != z;
      d1.push_back(w - z);
      d2.push_back(w * w - z * z);
    }
    const double n = static_cast<double>(chains);
    const double z1 = sample_mean(d1) / std::sqrt(sample_variance(d1) / n);
    const double z2 = sample_mean(d2) / std::sqrt(sample_variance(d2) / n);
    const bool ok = std::abs(z1) < 4.0 && std::abs(z2) < 4.0 && moved > 0;
    pass = pass && ok;
    detail += fmt("%s: mean %.2f SE, second moment %.2f SE, moved %zu; ", c.name.c_str(), z1, z2, moved);
  }
  return {pass, detail};
}

Outcome adaptive_recursion() {
  const TargetLogDensity target(Position{{"v", Tensor::vector({0.0, 0.0})}}, [](const Position& p) {
    const auto& v = p.at("v").reals();
    const double a = 1.0 / (1.0 - 0.64), b = -0.8 / (1.0 - 0.64);
    return -0.5 * (a * v[0] * v[0] + 2.0 * b * v[0] * v[1] + a * v[1] * v[1]);
  });
  const auto run = mcmc(1000, adaptive_rwmh(0.5), target, Position{{"v", Tensor::vector({3.0, -3.0})}},
                        key_from_seed(7));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < run.samples.num_samples(); ++i) rows.push_back(run.samples.read(i).at("v").reals());
  const auto batch = oracle::batch_covariance(rows);
  const auto& running = run.final_state.kernel[0].at("running_cov").reals();
  double frobenius = 0.0;
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) frobenius += std::pow(running[a * 2 + b] - batch[a][b], 2);
  }
  frobenius = std::sqrt(frobenius);
  return {frobenius < 1e-10, fmt("Frobenius distance %.2e after 1000 steps", frobenius)};
}

Outcome data_augmentation() {
  const auto c = tiny_sir(2);
  const sir::InitialState x0{{3, 1, 0}};
  const sir::EpiParams p{1.1, 0.4};
  const std::vector<std::int64_t> removals{0, 1};
  const auto exact = oracle::conditional_on_removals(tiny_oracle(c, x0, p), removals);

  sir::EventTensor start(2, 1);
  start(1, 0, sir::kIR) = 1;
  const auto kernel = mwg_step(sir::move_event_kernel(c), {"events"}) >>
                      mwg_step(sir::initial_conditions_kernel(c), {"events"});
  constexpr std::size_t steps = 1000000;
  const auto run = mcmc(steps, kernel, sir::sir_target(c, x0), sir::sir_position(p, start),
                        key_from_seed(8));
  std::map<std::vector<std::int64_t>, double> empirical;
  std::vector<std::vector<double>> cells;
  for (std::size_t k = 0; k < 4; ++k) cells.push_back(run.samples.column("events", k));
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<std::int64_t> key;
    for (std::size_t k = 0; k < 4; ++k) key.push_back(static_cast<std::int64_t>(cells[k][i]));
    empirical[key] += 1.0 / static_cast<double>(steps);
  }
  double tv = 0.0;
  for (const auto& [k, v] : exact) tv += 0.5 * std::abs(v - (empirical.contains(k) ? empirical[k] : 0.0));
  for (const auto& [k, v] : empirical) {
    if (!exact.contains(k)) tv += 0.5 * v;
  }
  return {tv < 0.05, fmt("%zu histories in the exact posterior, %zu visited, TV = %.4f", exact.size(),
                         empirical.size(), tv)};
}

Outcome desk_sir() {
  auto config = shipped("sir-fit.json", cli::Experiment::sir_fit);
  config.output_dir = scratch("sir-fit");
  std::ostringstream log;
  const auto started = std::chrono::steady_clock::now();
  cli::run_sir_fit(config, log);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const auto trace = read_columns(config.output_dir / "beta-trace.csv");
  const std::vector<std::pair<std::string, double>> truths{{"beta1", config.sir.true_params.beta1},
                                                          {"beta2", config.sir.true_params.beta2}};
  bool pass = seconds < 600.0 && config.num_samples == 20000;
  std::string detail = fmt("%zu iterations; ", config.num_samples);
  for (const auto& [name, truth] : truths) {
    const auto& column = trace.at(name);
    std::vector<double> kept(column.begin() + static_cast<std::ptrdiff_t>(config.sir.burn_in), column.end());
    const double z = geweke_z(kept);
    std::sort(kept.begin(), kept.end());
    // Type-7 quantiles, computed independently of the library summary.
    auto quantile = [&](double q) {
      const double h = (static_cast<double>(kept.size()) - 1.0) * q;
      const auto lo = static_cast<std::size_t>(h);
      return kept[lo] + (h - static_cast<double>(lo)) * (kept[std::min(lo + 1, kept.size() - 1)] - kept[lo]);
    };
    const double lo = quantile(0.025), hi = quantile(0.975);
    const bool covered = truth >= lo && truth <= hi;
    pass = pass && covered && std::abs(z) < 2.576;
    detail += fmt("%s truth %.3f in [%.4f, %.4f]: %s, Geweke z = %.2f; ", name.c_str(), truth, lo, hi,
                  covered ? "yes" : "no", z);
  }
  detail += fmt("runtime %.1f s", seconds);
  return {pass, detail};
}

Outcome determinism_and_associativity() {
  auto config = shipped("gaussian-mwg.json", cli::Experiment::gaussian_mwg);
  std::ostringstream log;
  std::vector<std::string> traces;
  for (const auto* run : {"a", "b"}) {
    config.output_dir = scratch(std::string("determinism-") + run);
    cli::run_gaussian_mwg(config, log);
    traces.push_back(slurp(config.output_dir / "trace.csv"));
  }
  const bool identical = !traces[0].empty() && traces[0] == traces[1];

  const auto target = gaussian_target_for(config);
  const auto a = mwg_step(rwmh(1.8), {"mu_x"});
  const auto b = mwg_step(adaptive_rwmh(1.0), {"mu_y"});
  const auto c = mwg_step(metropolis(0.1), {"mu_x", "mu_y"});
  const auto start = gaussian_position(5.0, 3.0);
  const auto left = mcmc(100, (a >> b) >> c, target, start, key_from_seed(10));
  const auto right = mcmc(100, a >> (b >> c), target, start, key_from_seed(10));
  const bool associative = left.samples.bitwise_equal(right.samples) &&
                           left.infos.bitwise_equal(right.infos) &&
                           bitwise_equal(left.final_state, right.final_state);
  return {identical && associative,
          fmt("trace.csv byte-identical across runs: %s (%zu bytes); (A>>B)>>C == A>>(B>>C) over 100 "
              "steps: %s",
              identical ? "yes" : "no", traces[0].size(), associative ? "yes" : "no")};
}

struct Criterion {
  int number;
  const char* name;
  double time_limit_seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "likelihood normalization", 1.0, likelihood_normalization},
      {2, "conditional exactness", 1.0, conditional_exactness},
      {3, "scope isolation", 5.0, scope_isolation},
      {4, "gaussian recovery", 60.0, gaussian_recovery},
      {5, "metropolis demo", 60.0, metropolis_demo},
      {6, "stationarity preservation", 10.0, stationarity},
      {7, "adaptive recursion", 1.0, adaptive_recursion},
      {8, "data-augmentation kernels", 120.0, data_augmentation},
      {9, "desk-scale sir recovery", 600.0, desk_sir},
      {10, "determinism and associativity", 5.0, determinism_and_associativity},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto started = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const bool in_time = seconds < criterion.time_limit_seconds;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::printf("%s %2d %s: %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", criterion.number,
                criterion.name, outcome.detail.c_str(), seconds, criterion.time_limit_seconds,
                in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::filesystem::remove_all(std::filesystem::temp_directory_path() /
                              ("mwg-acceptance-" + std::to_string(::getpid())));
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
