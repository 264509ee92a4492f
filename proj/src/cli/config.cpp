#include "mwg/cli/config.hpp"

#include <fstream>
#include <set>

namespace mwg::cli {
namespace {

using nlohmann::json;

/// Strict view over one JSON object: every key must be consumed.
class ObjectReader {
 public:
  ObjectReader(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return value_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return value_.at(key);
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? as_number(raw(key), field(key)) : fallback;
  }

  std::size_t count(const std::string& key, std::size_t fallback, bool positive = true) {
    if (!has(key)) return fallback;
    return as_count(raw(key), field(key), positive);
  }

  Eigen::Vector2d vector2(const std::string& key, const Eigen::Vector2d& fallback) {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (!v.is_array() || v.size() != 2) throw ConfigError(field(key) + " must be a 2-element array");
    return Eigen::Vector2d(as_number(v[0], field(key) + "[0]"), as_number(v[1], field(key) + "[1]"));
  }

  Eigen::MatrixXd matrix(const std::string& key, std::size_t rows, std::size_t cols) {
    const auto& v = raw(key);
    const auto name = field(key);
    if (!v.is_array() || v.size() != rows) {
      throw ConfigError(name + " must have " + std::to_string(rows) + " rows");
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      if (!v[r].is_array() || v[r].size() != cols) {
        throw ConfigError(name + "[" + std::to_string(r) + "] must have " + std::to_string(cols) +
                          " entries");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            as_number(v[r][c], name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
      }
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : value_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown field " + field(key));
    }
  }

  static double as_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(name + " must be finite");
    return x;
  }

  static std::size_t as_count(const json& v, const std::string& name, bool positive) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(name + " must be a non-negative integer");
    }
    const auto n = v.get<std::uint64_t>();
    if (positive && n == 0) throw ConfigError(name + " must be positive");
    return static_cast<std::size_t>(n);
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& value_;
  std::string path_;
  std::set<std::string> seen_;
};

sir::EpiParams read_params(ObjectReader& parent, const std::string& key,
                           const sir::EpiParams& fallback) {
  if (!parent.has(key)) return fallback;
  ObjectReader r(parent.raw(key), parent.field(key));
  sir::EpiParams p{r.number("beta1", fallback.beta1), r.number("beta2", fallback.beta2)};
  r.finish();
  if (!(p.beta1 > 0.0) || !(p.beta2 > 0.0)) {
    throw ConfigError(parent.field(key) + ": beta1 and beta2 must be positive");
  }
  return p;
}

GaussianSettings read_gaussian(const json& value, bool mwg) {
  GaussianSettings g;
  ObjectReader r(value, "gaussian");
  if (r.has("true_cov")) g.true_cov = r.matrix("true_cov", 2, 2);
  g.true_mean = r.vector2("true_mean", g.true_mean);
  g.num_data = r.count("num_data", g.num_data, false);
  g.prior_mean = r.vector2("prior_mean", g.prior_mean);
  g.prior_scale = r.number("prior_scale", g.prior_scale);
  g.initial_position = r.vector2("initial_position", g.initial_position);
  if (mwg) {
    g.rwmh_scale = r.number("rwmh_scale", g.rwmh_scale);
    g.adaptive_initial_scale = r.number("adaptive_initial_scale", g.adaptive_initial_scale);
  } else {
    g.metropolis_tau = r.number("metropolis_tau", g.metropolis_tau);
    g.thin = r.count("thin", g.thin);
  }
  g.burn_in = r.count("burn_in", g.burn_in, false);
  g.grid_points = r.count("grid_points", g.grid_points);
  r.finish();

  if (!(g.prior_scale > 0.0)) throw ConfigError("gaussian.prior_scale must be positive");
  if (!(g.rwmh_scale > 0.0)) throw ConfigError("gaussian.rwmh_scale must be positive");
  if (!(g.adaptive_initial_scale > 0.0)) {
    throw ConfigError("gaussian.adaptive_initial_scale must be positive");
  }
  if (!(g.metropolis_tau > 0.0)) throw ConfigError("gaussian.metropolis_tau must be positive");
  if (g.grid_points < 2) throw ConfigError("gaussian.grid_points must be at least 2");
  GaussianModelSpec probe{g.true_cov, g.prior_mean, g.prior_scale, {}};
  try {
    gaussian_mean_target(probe);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("gaussian: ") + e.what());
  }
  return g;
}

SirSettings read_sir(const json& value, bool fit, const std::filesystem::path& base_dir) {
  SirSettings s;
  ObjectReader r(value, "sir");
  if (!r.has("population")) throw ConfigError("sir.population is required");
  const auto& pop = r.raw("population");
  if (!pop.is_array() || pop.empty()) throw ConfigError("sir.population must be a non-empty array");
  for (std::size_t i = 0; i < pop.size(); ++i) {
    s.model.population.push_back(static_cast<std::int64_t>(
        ObjectReader::as_count(pop[i], "sir.population[" + std::to_string(i) + "]", true)));
  }
  const std::size_t m = s.model.population.size();
  if (!r.has("connectivity")) throw ConfigError("sir.connectivity is required");
  s.model.connectivity = r.matrix("connectivity", m, m);
  s.model.gamma = r.number("gamma", s.model.gamma);
  if (!r.has("num_times")) throw ConfigError("sir.num_times is required");
  s.model.num_times = r.count("num_times", 1);
  s.model.delta_t = r.number("delta_t", s.model.delta_t);
  s.model.init_window = r.count("init_window", std::min<std::size_t>(12, s.model.num_times));

  if (!r.has("initial_state")) throw ConfigError("sir.initial_state is required");
  const Eigen::MatrixXd x0 = r.matrix("initial_state", m, 3);
  for (Eigen::Index i = 0; i < x0.rows(); ++i) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      const double v = x0(i, c);
      if (v < 0.0 || v != std::floor(v)) {
        throw ConfigError("sir.initial_state entries must be non-negative integers");
      }
      s.initial_state.counts.push_back(static_cast<std::int64_t>(v));
    }
  }
  s.true_params = read_params(r, "true_params", s.true_params);
  if (fit) {
    s.initial_params = read_params(r, "initial_params", s.initial_params);
    if (r.has("events_file")) {
      const auto& v = r.raw("events_file");
      if (!v.is_string()) throw ConfigError("sir.events_file must be a string");
      std::filesystem::path p = v.get<std::string>();
      s.events_file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    s.param_kernel_scale = r.number("param_kernel_scale", s.param_kernel_scale);
    if (!(s.param_kernel_scale > 0.0)) throw ConfigError("sir.param_kernel_scale must be positive");
    s.num_da_scans = r.count("num_da_scans", s.num_da_scans);
    s.burn_in = r.count("burn_in", s.burn_in, false);
  }
  r.finish();

  try {
    s.model.validate();
    s.initial_state.validate(s.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sir: ") + e.what());
  }
  return s;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vector_json(const Eigen::Vector2d& v) { return json::array({v(0), v(1)}); }

json params_json(const sir::EpiParams& p) { return {{"beta1", p.beta1}, {"beta2", p.beta2}}; }

}  // namespace

std::string experiment_name(Experiment experiment) {
  switch (experiment) {
    case Experiment::gaussian_mwg: return "gaussian-mwg";
    case Experiment::metropolis_demo: return "metropolis-demo";
    case Experiment::sir_simulate: return "sir-simulate";
    case Experiment::sir_fit: return "sir-fit";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (auto e : {Experiment::gaussian_mwg, Experiment::metropolis_demo, Experiment::sir_simulate,
                 Experiment::sir_fit}) {
    if (experiment_name(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + name +
                    "' (expected gaussian-mwg, metropolis-demo, sir-simulate or sir-fit)");
}

ExperimentConfig parse_config(const json& document, Experiment experiment,
                              const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  config.experiment = experiment;
  ObjectReader r(document, "");
  if (r.has("experiment")) {
    const auto& v = r.raw("experiment");
    if (!v.is_string()) throw ConfigError("experiment must be a string");
    if (parse_experiment(v.get<std::string>()) != experiment) {
      throw ConfigError("config is for experiment '" + v.get<std::string>() + "', not '" +
                        experiment_name(experiment) + "'");
    }
  }
  if (r.has("seed")) {
    const auto& v = r.raw("seed");
    if (!v.is_number_unsigned()) throw ConfigError("seed must be an unsigned 64-bit integer");
    config.seed = v.get<std::uint64_t>();
  }
  config.num_samples = r.count("num_samples", config.num_samples);
  if (r.has("output_dir")) {
    const auto& v = r.raw("output_dir");
    if (!v.is_string()) throw ConfigError("output_dir must be a string");
    config.output_dir = v.get<std::string>();
  }
  config.chains = r.count("chains", config.chains);

  const bool gaussian =
      experiment == Experiment::gaussian_mwg || experiment == Experiment::metropolis_demo;
  if (gaussian) {
    config.gaussian = read_gaussian(r.has("gaussian") ? r.raw("gaussian") : json::object(),
                                    experiment == Experiment::gaussian_mwg);
    if (config.gaussian.burn_in >= config.num_samples) {
      throw ConfigError("gaussian.burn_in must be less than num_samples");
    }
  } else {
    if (!r.has("sir")) throw ConfigError("sir block is required for " + experiment_name(experiment));
    config.sir = read_sir(r.raw("sir"), experiment == Experiment::sir_fit, base_dir);
    if (experiment == Experiment::sir_fit && config.sir.burn_in >= config.num_samples) {
      throw ConfigError("sir.burn_in must be less than num_samples");
    }
  }
  r.finish();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, Experiment experiment) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json document;
  try {
    document = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(document, experiment, path.parent_path());
}

json to_json(const ExperimentConfig& config) {
  json out{{"experiment", experiment_name(config.experiment)},
           {"seed", config.seed},
           {"num_samples", config.num_samples},
           {"output_dir", config.output_dir.string()},
           {"chains", config.chains}};
  if (config.experiment == Experiment::gaussian_mwg ||
      config.experiment == Experiment::metropolis_demo) {
    const auto& g = config.gaussian;
    json block{{"true_cov", matrix_json(g.true_cov)},
               {"true_mean", vector_json(g.true_mean)},
               {"num_data", g.num_data},
               {"prior_mean", vector_json(g.prior_mean)},
               {"prior_scale", g.prior_scale},
               {"initial_position", vector_json(g.initial_position)},
               {"burn_in", g.burn_in},
               {"grid_points", g.grid_points}};
    if (config.experiment == Experiment::gaussian_mwg) {
      block["rwmh_scale"] = g.rwmh_scale;
      block["adaptive_initial_scale"] = g.adaptive_initial_scale;
    } else {
      block["metropolis_tau"] = g.metropolis_tau;
      block["thin"] = g.thin;
    }
    out["gaussian"] = block;
  } else {
    const auto& s = config.sir;
    Eigen::MatrixXd x0(static_cast<Eigen::Index>(s.model.num_pops()), 3);
    for (std::size_t i = 0; i < s.model.num_pops(); ++i) {
      for (std::size_t c = 0; c < 3; ++c) {
        x0(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
            static_cast<double>(s.initial_state(i, c));
      }
    }
    json block{{"population", s.model.population},
               {"connectivity", matrix_json(s.model.connectivity)},
               {"gamma", s.model.gamma},
               {"num_times", s.model.num_times},
               {"delta_t", s.model.delta_t},
               {"init_window", s.model.init_window},
               {"initial_state", matrix_json(x0)},
               {"true_params", params_json(s.true_params)}};
    if (config.experiment == Experiment::sir_fit) {
      block["initial_params"] = params_json(s.initial_params);
      if (s.events_file) block["events_file"] = s.events_file->string();
      block["param_kernel_scale"] = s.param_kernel_scale;
      block["num_da_scans"] = s.num_da_scans;
      block["burn_in"] = s.burn_in;
    }
    out["sir"] = block;
  }
  return out;
}

}  // namespace mwg::cli
