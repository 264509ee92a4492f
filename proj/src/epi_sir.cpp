#include "mwg/epi_sir.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mwg/kernels.hpp"

namespace mwg::sir {
namespace {

constexpr double kPriorRate = 0.001;

std::string at_cell(std::size_t t, std::size_t pop) {
  return " at block " + std::to_string(t) + ", population " + std::to_string(pop);
}

void check_shapes(const MetaPopConfig& config, const InitialState& x0, const EventTensor& events) {
  if (events.num_times() != config.num_times || events.num_pops() != config.num_pops()) {
    throw std::invalid_argument("event tensor is " + std::to_string(events.num_times()) + " x " +
                                std::to_string(events.num_pops()) + ", expected " +
                                std::to_string(config.num_times) + " x " +
                                std::to_string(config.num_pops()));
  }
  if (x0.counts.size() != config.num_pops() * 3) {
    throw std::invalid_argument("initial state must have one (S, I, R) row per population");
  }
}

/// Per-susceptible infection hazards for one block.
std::vector<double> hazards(const MetaPopConfig& config, const EpiParams& params,
                            std::span<const std::int64_t> state) {
  const std::size_t m = config.num_pops();
  Eigen::VectorXd prevalence(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    prevalence(static_cast<Eigen::Index>(j)) =
        static_cast<double>(state[j * 3 + kI]) / static_cast<double>(config.population[j]);
  }
  const Eigen::VectorXd coupled = config.connectivity * prevalence;
  std::vector<double> h(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h[i] = params.beta1 * prevalence(ii) + params.beta2 * coupled(ii);
  }
  return h;
}

/// Chain-binomial likelihood with cached log-factorials.
class ChainBinomial {
 public:
  ChainBinomial(const MetaPopConfig& config, const InitialState& x0) : config_(config), x0_(x0) {
    std::int64_t largest = 0;
    for (auto n : config.population) largest = std::max(largest, n);
    log_factorial_.resize(static_cast<std::size_t>(largest) + 1);
    log_factorial_[0] = 0.0;
    for (std::size_t k = 1; k < log_factorial_.size(); ++k) {
      log_factorial_[k] = std::lgamma(static_cast<double>(k) + 1.0);
    }
    log_stay_removal_ = -config.gamma * config.delta_t;
    log_removal_ = std::log(-std::expm1(log_stay_removal_));
  }

  double operator()(const EpiParams& params, const EventTensor& events) const {
    const std::size_t m = config_.num_pops();
    std::vector<std::int64_t> state = x0_.counts;
    double total = 0.0;
    for (std::size_t t = 0; t < config_.num_times; ++t) {
      const auto h = hazards(config_, params, state);
      for (std::size_t i = 0; i < m; ++i) {
        const std::int64_t s = state[i * 3 + kS];
        const std::int64_t inf = state[i * 3 + kI];
        const std::int64_t y_si = events(t, i, kSI);
        const std::int64_t y_ir = events(t, i, kIR);
        if (y_si < 0 || y_ir < 0 || y_si > s || y_ir > inf) {
          return -std::numeric_limits<double>::infinity();
        }
        const double exposure = h[i] * config_.delta_t;
        if (exposure <= 0.0) {
          if (y_si > 0) return -std::numeric_limits<double>::infinity();
        } else {
          total += log_choose(s, y_si) + static_cast<double>(y_si) * std::log(-std::expm1(-exposure)) -
                   static_cast<double>(s - y_si) * exposure;
        }
        total += log_choose(inf, y_ir) + static_cast<double>(y_ir) * log_removal_ +
                 static_cast<double>(inf - y_ir) * log_stay_removal_;
        state[i * 3 + kS] -= y_si;
        state[i * 3 + kI] += y_si - y_ir;
        state[i * 3 + kR] += y_ir;
      }
    }
    return total;
  }

 private:
  double log_choose(std::int64_t n, std::int64_t k) const {
    return log_factorial_[static_cast<std::size_t>(n)] -
           log_factorial_[static_cast<std::size_t>(k)] -
           log_factorial_[static_cast<std::size_t>(n - k)];
  }

  MetaPopConfig config_;
  InitialState x0_;
  std::vector<double> log_factorial_;
  double log_removal_ = 0.0;
  double log_stay_removal_ = 0.0;
};

EpiParams params_from(const Position& position) {
  return EpiParams{position.at("beta1").item(), position.at("beta2").item()};
}

Tensor cell_tensor(std::int64_t t, std::int64_t pop) {
  return Tensor(Shape{2}, std::vector<std::int64_t>{t, pop});
}

const Tensor& sole_entry(const Position& local, const char* kernel) {
  if (local.size() != 1 || local.entries()[0].second.is_real()) {
    throw std::invalid_argument(std::string(kernel) +
                                ": local position must be a single integer event tensor");
  }
  return local.entries()[0].second;
}

Position replace_sole_entry(const Position& local, const EventTensor& events) {
  return Position{{local.entries()[0].first, events.to_tensor()}};
}

}  // namespace

void MetaPopConfig::validate() const {
  const std::size_t m = num_pops();
  if (m == 0) throw std::invalid_argument("config: at least one population is required");
  for (std::size_t i = 0; i < m; ++i) {
    if (population[i] <= 0) {
      throw std::invalid_argument("config: population " + std::to_string(i) + " must be positive");
    }
  }
  if (connectivity.rows() != static_cast<Eigen::Index>(m) ||
      connectivity.cols() != static_cast<Eigen::Index>(m)) {
    throw std::invalid_argument("config: connectivity must be " + std::to_string(m) + " x " +
                                std::to_string(m));
  }
  if (!connectivity.allFinite() || (connectivity.array() < 0.0).any()) {
    throw std::invalid_argument("config: connectivity entries must be finite and non-negative");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("config: gamma must be positive");
  }
  if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
    throw std::invalid_argument("config: delta_t must be positive");
  }
  if (num_times == 0) throw std::invalid_argument("config: num_times must be positive");
  if (init_window == 0 || init_window > num_times) {
    throw std::invalid_argument("config: init_window must lie in [1, num_times]");
  }
}

EventTensor::EventTensor(std::size_t num_times, std::size_t num_pops)
    : num_times_(num_times), num_pops_(num_pops), counts_(num_times * num_pops * 2, 0) {}

Tensor EventTensor::to_tensor() const { return Tensor(Shape{num_times_, num_pops_, 2}, counts_); }

EventTensor EventTensor::from_tensor(const Tensor& tensor) {
  if (tensor.is_real() || tensor.shape().size() != 3 || tensor.shape()[2] != 2) {
    throw std::invalid_argument("event tensor must be integer-valued with shape [T, m, 2], got " +
                                shape_to_string(tensor.shape()));
  }
  EventTensor out(tensor.shape()[0], tensor.shape()[1]);
  out.counts_ = tensor.integers();
  return out;
}

void InitialState::validate(const MetaPopConfig& config) const {
  if (counts.size() != config.num_pops() * 3) {
    throw std::invalid_argument("initial state must have one (S, I, R) row per population");
  }
  for (std::size_t i = 0; i < config.num_pops(); ++i) {
    const auto s = (*this)(i, kS), inf = (*this)(i, kI), r = (*this)(i, kR);
    if (s < 0 || inf < 0 || r < 0 || s + inf + r != config.population[i]) {
      throw std::invalid_argument("initial state row " + std::to_string(i) +
                                  " must be non-negative and sum to the population size");
    }
  }
}

std::vector<double> si_hazard(const MetaPopConfig& config, const EpiParams& params,
                              std::span<const std::int64_t> state) {
  if (state.size() != config.num_pops() * 3) {
    throw std::invalid_argument("si_hazard: state must be m x 3");
  }
  auto p = hazards(config, params, state);
  for (auto& v : p) v = -std::expm1(-v * config.delta_t);
  return p;
}

EventTensor simulate(const MetaPopConfig& config, const EpiParams& params, const InitialState& x0,
                     const RngKey& key) {
  config.validate();
  x0.validate(config);
  const std::size_t m = config.num_pops();
  const double removal_p = -std::expm1(-config.gamma * config.delta_t);
  RandomStream stream(key);
  EventTensor events(config.num_times, m);
  std::vector<std::int64_t> state = x0.counts;
  for (std::size_t t = 0; t < config.num_times; ++t) {
    const auto p = si_hazard(config, params, state);
    for (std::size_t i = 0; i < m; ++i) {
      events(t, i, kSI) = stream.next_binomial(state[i * 3 + kS], p[i]);
      events(t, i, kIR) = stream.next_binomial(state[i * 3 + kI], removal_p);
    }
    for (std::size_t i = 0; i < m; ++i) {
      state[i * 3 + kS] -= events(t, i, kSI);
      state[i * 3 + kI] += events(t, i, kSI) - events(t, i, kIR);
      state[i * 3 + kR] += events(t, i, kIR);
    }
  }
  return events;
}

std::optional<Trajectory> state_trajectory(const MetaPopConfig& config, const InitialState& x0,
                                           const EventTensor& events) {
  check_shapes(config, x0, events);
  const std::size_t m = config.num_pops();
  Trajectory out{config.num_times, m, std::vector<std::int64_t>((config.num_times + 1) * m * 3)};
  std::copy(x0.counts.begin(), x0.counts.end(), out.counts.begin());
  for (std::size_t t = 0; t < config.num_times; ++t) {
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t now = (t * m + i) * 3;
      const std::size_t next = ((t + 1) * m + i) * 3;
      const auto y_si = events(t, i, kSI);
      const auto y_ir = events(t, i, kIR);
      if (y_si < 0 || y_ir < 0 || y_si > out.counts[now + kS] || y_ir > out.counts[now + kI]) {
        return std::nullopt;
      }
      out.counts[next + kS] = out.counts[now + kS] - y_si;
      out.counts[next + kI] = out.counts[now + kI] + y_si - y_ir;
      out.counts[next + kR] = out.counts[now + kR] + y_ir;
    }
  }
  return out;
}

double log_likelihood(const MetaPopConfig& config, const EpiParams& params,
                      const InitialState& x0, const EventTensor& events) {
  check_shapes(config, x0, events);
  return ChainBinomial(config, x0)(params, events);
}

double log_prior(const EpiParams& params) {
  if (!(params.beta1 > 0.0) || !(params.beta2 > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return 2.0 * std::log(kPriorRate) - kPriorRate * (params.beta1 + params.beta2);
}

double log_density(const MetaPopConfig& config, const EpiParams& params, const InitialState& x0,
                   const EventTensor& events) {
  const double prior = log_prior(params);
  if (prior == -std::numeric_limits<double>::infinity()) return prior;
  return log_likelihood(config, params, x0, events) + prior;
}

Position sir_position(const EpiParams& params, const EventTensor& events) {
  return Position{{"beta1", Tensor::scalar(params.beta1)},
                  {"beta2", Tensor::scalar(params.beta2)},
                  {"events", events.to_tensor()}};
}

TargetLogDensity sir_target(const MetaPopConfig& config, const InitialState& x0) {
  config.validate();
  x0.validate(config);
  auto likelihood = std::make_shared<const ChainBinomial>(config, x0);
  return TargetLogDensity(
      sir_position(EpiParams{1.0, 1.0}, EventTensor(config.num_times, config.num_pops())),
      [likelihood](const Position& position) {
        const auto params = params_from(position);
        const double prior = log_prior(params);
        if (prior == -std::numeric_limits<double>::infinity()) return prior;
        const auto& events = position.at("events");
        return (*likelihood)(params, EventTensor::from_tensor(events)) + prior;
      });
}

SamplingAlgorithm move_event_kernel(const MetaPopConfig& config) {
  config.validate();
  auto init = [](const TargetLogDensity& target, const Position& position) {
    sole_entry(position, "move_event_kernel");
    return ChainAndKernelState{ChainState{position, target(position), {}}, {Record{}}};
  };

  auto step = [](const TargetLogDensity& target, const ChainAndKernelState& state,
                 const RngKey& key) {
    const auto& local = state.chain.position;
    const EventTensor events = EventTensor::from_tensor(sole_entry(local, "move_event_kernel"));
    const std::size_t num_times = events.num_times();
    const std::size_t m = events.num_pops();

    std::int64_t total = 0;
    for (std::size_t t = 0; t < num_times; ++t) {
      for (std::size_t i = 0; i < m; ++i) total += events(t, i, kSI);
    }

    auto info = [](bool accepted, double log_acceptance, Tensor source, Tensor destination) {
      return Info::leaf(Record{{"is_accepted", Tensor::integer_scalar(accepted ? 1 : 0)},
                               {"log_acceptance", Tensor::scalar(log_acceptance)},
                               {"source", std::move(source)},
                               {"destination", std::move(destination)}});
    };
    if (total == 0 || num_times < 2) {
      return StepResult{state, info(false, kNegInf, cell_tensor(-1, -1), cell_tensor(-1, -1))};
    }

    const auto keys = split(key, 3);
    RandomStream pick(keys[0]);
    auto remaining = static_cast<std::int64_t>(pick.next_below(static_cast<std::uint64_t>(total)));
    std::size_t src_t = 0, pop = 0;
    for (std::size_t cell = 0; cell < num_times * m; ++cell) {
      const auto count = events(cell / m, cell % m, kSI);
      if (remaining < count) {
        src_t = cell / m;
        pop = cell % m;
        break;
      }
      remaining -= count;
    }
    RandomStream dest(keys[1]);
    std::size_t dst_t = dest.next_below(num_times - 1);
    if (dst_t >= src_t) ++dst_t;

    EventTensor proposed = events;
    proposed(src_t, pop, kSI) -= 1;
    proposed(dst_t, pop, kSI) += 1;
    Position proposed_position = replace_sole_entry(local, proposed);
    const double proposed_log_density = target(proposed_position);
    // Reverse move must pick one of the destination's events; forward picked
    // one of the source's.
    const double log_proposal_ratio =
        std::log(static_cast<double>(proposed(dst_t, pop, kSI))) -
        std::log(static_cast<double>(events(src_t, pop, kSI)));
    const double log_acceptance =
        proposed_log_density - state.chain.log_density + log_proposal_ratio;
    const bool accepted = metropolis_accept(log_acceptance, keys[2]);

    auto record = info(accepted, log_acceptance,
                       cell_tensor(static_cast<std::int64_t>(src_t), static_cast<std::int64_t>(pop)),
                       cell_tensor(static_cast<std::int64_t>(dst_t), static_cast<std::int64_t>(pop)));
    if (!accepted) return StepResult{state, std::move(record)};
    return StepResult{
        ChainAndKernelState{ChainState{std::move(proposed_position), proposed_log_density, {}},
                            state.kernel},
        std::move(record)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step));
}

SamplingAlgorithm initial_conditions_kernel(const MetaPopConfig& config) {
  config.validate();
  const std::size_t window = config.init_window;

  auto init = [](const TargetLogDensity& target, const Position& position) {
    sole_entry(position, "initial_conditions_kernel");
    return ChainAndKernelState{ChainState{position, target(position), {}}, {Record{}}};
  };

  auto step = [window](const TargetLogDensity& target, const ChainAndKernelState& state,
                       const RngKey& key) {
    const auto& local = state.chain.position;
    const EventTensor events =
        EventTensor::from_tensor(sole_entry(local, "initial_conditions_kernel"));
    const std::size_t m = events.num_pops();
    const std::size_t w = std::min(window, events.num_times());
    const double num_cells = static_cast<double>(w * m);

    auto info = [](bool accepted, double log_acceptance, bool is_add, std::int64_t t,
                   std::int64_t pop, bool empty_delete) {
      return Info::leaf(Record{{"is_accepted", Tensor::integer_scalar(accepted ? 1 : 0)},
                               {"log_acceptance", Tensor::scalar(log_acceptance)},
                               {"is_add", Tensor::integer_scalar(is_add ? 1 : 0)},
                               {"block", cell_tensor(t, pop)},
                               {"empty_delete", Tensor::integer_scalar(empty_delete ? 1 : 0)}});
    };

    const auto keys = split(key, 3);
    const bool is_add = bernoulli(keys[0], 0.5, 1)[0];
    RandomStream pick(keys[1]);

    std::int64_t in_window = 0;
    for (std::size_t t = 0; t < w; ++t) {
      for (std::size_t i = 0; i < m; ++i) in_window += events(t, i, kSI);
    }

    EventTensor proposed = events;
    std::size_t t = 0, pop = 0;
    double log_proposal_ratio = 0.0;
    if (is_add) {
      const auto cell = pick.next_below(w * m);
      t = cell / m;
      pop = cell % m;
      proposed(t, pop, kSI) += 1;
      // Reverse: delete one of the now proposed(t, pop) events among in_window + 1.
      log_proposal_ratio = std::log(num_cells) +
                           std::log(static_cast<double>(proposed(t, pop, kSI))) -
                           std::log(static_cast<double>(in_window + 1));
    } else {
      if (in_window == 0) return StepResult{state, info(false, kNegInf, false, -1, -1, true)};
      auto remaining =
          static_cast<std::int64_t>(pick.next_below(static_cast<std::uint64_t>(in_window)));
      for (std::size_t cell = 0; cell < w * m; ++cell) {
        const auto count = events(cell / m, cell % m, kSI);
        if (remaining < count) {
          t = cell / m;
          pop = cell % m;
          break;
        }
        remaining -= count;
      }
      proposed(t, pop, kSI) -= 1;
      log_proposal_ratio = std::log(static_cast<double>(in_window)) - std::log(num_cells) -
                           std::log(static_cast<double>(events(t, pop, kSI)));
    }

    Position proposed_position = replace_sole_entry(local, proposed);
    const double proposed_log_density = target(proposed_position);
    const double log_acceptance =
        proposed_log_density - state.chain.log_density + log_proposal_ratio;
    const bool accepted = metropolis_accept(log_acceptance, keys[2]);
    auto record = info(accepted, log_acceptance, is_add, static_cast<std::int64_t>(t),
                       static_cast<std::int64_t>(pop), false);
    if (!accepted) return StepResult{state, std::move(record)};
    return StepResult{
        ChainAndKernelState{ChainState{std::move(proposed_position), proposed_log_density, {}},
                            state.kernel},
        std::move(record)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step));
}

SamplingAlgorithm build_sir_mwg(const MetaPopConfig& config, double param_kernel_scale,
                                std::size_t num_da_scans) {
  config.validate();
  const auto parameters =
      mwg_step(on_log_scale(adaptive_rwmh(param_kernel_scale)), {"beta1", "beta2"});
  const auto moves = mwg_step(move_event_kernel(config), {"events"});
  const auto additions = mwg_step(initial_conditions_kernel(config), {"events"});
  return parameters >> multi_scan(num_da_scans, moves >> additions);
}

EventTensor impute_infections(const MetaPopConfig& config, const InitialState& x0,
                              const EventTensor& removals) {
  config.validate();
  x0.validate(config);
  check_shapes(config, x0, removals);
  const std::size_t m = config.num_pops();
  const auto lag = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(1.0 / (config.gamma * config.delta_t))));

  EventTensor out(config.num_times, m);
  for (std::size_t i = 0; i < m; ++i) {
    std::int64_t infected = x0(i, kI);
    std::int64_t susceptible_left = x0(i, kS);
    for (std::size_t t = 0; t < config.num_times; ++t) {
      const std::int64_t removed = removals(t, i, kIR);
      if (removed < 0) throw std::invalid_argument("negative removal count" + at_cell(t, i));
      out(t, i, kIR) = removed;
      if (removed > infected) {
        const std::int64_t deficit = removed - infected;
        if (t == 0 || deficit > susceptible_left) {
          throw std::invalid_argument("removals cannot be explained by any infection history" +
                                      at_cell(t, i));
        }
        // All infections placed so far lie before t, so adding earlier keeps
        // every earlier block feasible and raises I in between.
        out(t - std::min(lag, t), i, kSI) += deficit;
        infected += deficit;
        susceptible_left -= deficit;
      }
      infected -= removed;
    }
  }
  return out;
}

}  // namespace mwg::sir
