#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mwg/compose.hpp"
#include "mwg/prng.hpp"
#include "mwg/target.hpp"

namespace mwg::sir {

/// Discrete-time metapopulation SIR model.
///
/// Per block t and population i the per-susceptible infection hazard is
///   h_i = beta1 * I_i / N_i + beta2 * sum_j C_ij * I_j / N_j
/// and transitions are chain-binomial:
///   S->I ~ Binomial(S_i, 1 - exp(-h_i * dt)),  I->R ~ Binomial(I_i, 1 - exp(-gamma * dt)).
struct MetaPopConfig {
  std::vector<std::int64_t> population;  // N, one entry per population
  Eigen::MatrixXd connectivity;          // C, m x m, non-negative
  double gamma = 0.1;
  std::size_t num_times = 1;
  double delta_t = 1.0;
  /// Blocks [0, init_window) are open to infection additions/deletions.
  std::size_t init_window = 12;

  std::size_t num_pops() const { return population.size(); }
  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct EpiParams {
  double beta1 = 0.0;
  double beta2 = 0.0;
};

enum Transition : std::size_t { kSI = 0, kIR = 1 };
enum Compartment : std::size_t { kS = 0, kI = 1, kR = 2 };

/// T x m x 2 non-negative transition counts.
class EventTensor {
 public:
  EventTensor() = default;
  EventTensor(std::size_t num_times, std::size_t num_pops);

  std::size_t num_times() const { return num_times_; }
  std::size_t num_pops() const { return num_pops_; }

  std::int64_t& operator()(std::size_t t, std::size_t pop, std::size_t transition) {
    return counts_[(t * num_pops_ + pop) * 2 + transition];
  }
  std::int64_t operator()(std::size_t t, std::size_t pop, std::size_t transition) const {
    return counts_[(t * num_pops_ + pop) * 2 + transition];
  }

  const std::vector<std::int64_t>& counts() const { return counts_; }

  Tensor to_tensor() const;
  /// Throws std::invalid_argument unless `tensor` is an integer [T, m, 2].
  static EventTensor from_tensor(const Tensor& tensor);

  friend bool operator==(const EventTensor&, const EventTensor&) = default;

 private:
  std::size_t num_times_ = 0;
  std::size_t num_pops_ = 0;
  std::vector<std::int64_t> counts_;
};

/// m x 3 counts (S, I, R) at time 0.
struct InitialState {
  std::vector<std::int64_t> counts;

  std::int64_t operator()(std::size_t pop, std::size_t compartment) const {
    return counts[pop * 3 + compartment];
  }
  /// Throws std::invalid_argument unless rows are non-negative and sum to N.
  void validate(const MetaPopConfig& config) const;
};

/// (T + 1) x m x 3 compartment counts.
struct Trajectory {
  std::size_t num_times = 0;
  std::size_t num_pops = 0;
  std::vector<std::int64_t> counts;

  std::int64_t operator()(std::size_t t, std::size_t pop, std::size_t compartment) const {
    return counts[(t * num_pops + pop) * 3 + compartment];
  }
};

/// Per-susceptible infection probability for each population, given the
/// compartment counts of one block (m x 3, row-major).
std::vector<double> si_hazard(const MetaPopConfig& config, const EpiParams& params,
                              std::span<const std::int64_t> state);

EventTensor simulate(const MetaPopConfig& config, const EpiParams& params, const InitialState& x0,
                     const RngKey& key);

/// Compartment counts implied by the events, or std::nullopt if some block
/// draws more transitions out of a compartment than it holds (or a count is
/// negative). Throws std::invalid_argument on a shape mismatch.
std::optional<Trajectory> state_trajectory(const MetaPopConfig& config, const InitialState& x0,
                                           const EventTensor& events);

/// Chain-binomial log-probability of the events without priors; -inf when
/// infeasible.
double log_likelihood(const MetaPopConfig& config, const EpiParams& params,
                      const InitialState& x0, const EventTensor& events);

/// Independent Exponential(rate 0.001) priors on beta1 and beta2; -inf
/// outside the positive orthant.
double log_prior(const EpiParams& params);

/// log_likelihood + log_prior.
double log_density(const MetaPopConfig& config, const EpiParams& params, const InitialState& x0,
                   const EventTensor& events);

/// Target over {beta1: scalar, beta2: scalar, events: int [T, m, 2]}.
TargetLogDensity sir_target(const MetaPopConfig& config, const InitialState& x0);

Position sir_position(const EpiParams& params, const EventTensor& events);

/// Moves one uniformly chosen S->I event to a different block of the same
/// population. The local position must be a single [T, m, 2] integer entry.
/// Info: is_accepted, log_acceptance, source (t, pop), destination (t, pop);
/// source and destination are (-1, -1) when no event exists.
SamplingAlgorithm move_event_kernel(const MetaPopConfig& config);

/// Adds or deletes (probability 1/2 each) one S->I event inside the first
/// init_window blocks. Info: is_accepted, log_acceptance, is_add,
/// block (t, pop), empty_delete.
SamplingAlgorithm initial_conditions_kernel(const MetaPopConfig& config);

/// Parameter kernel (adaptive random walk on log beta) followed by
/// num_da_scans repetitions of (move >> initial-conditions) on the events.
SamplingAlgorithm build_sir_mwg(const MetaPopConfig& config, double param_kernel_scale,
                                std::size_t num_da_scans = 20);

/// A feasible S->I assignment for observed I->R counts: each removal's
/// infection is placed about 1/gamma blocks earlier, then deficits are
/// repaired block by block. Throws std::invalid_argument if the removals
/// cannot be explained.
EventTensor impute_infections(const MetaPopConfig& config, const InitialState& x0,
                              const EventTensor& removals);

}  // namespace mwg::sir
