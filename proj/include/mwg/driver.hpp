#pragma once

#include <string>
#include <vector>

#include "mwg/compose.hpp"
#include "mwg/trace.hpp"

namespace mwg {

struct RunMeta {
  RngKey seed;
  std::size_t num_samples = 0;
  double wall_seconds = 0.0;
};

/// Output of one chain. Row i of `samples` and `infos` holds the state after
/// i + 1 steps; the initial position is not stored.
struct McmcRun {
  TraceBuffer samples;
  InfoTrace infos;
  RunMeta meta;
  ChainAndKernelState final_state;
};

/// Runs `num_samples` steps. Step i uses fold_in(seed, i).
///
/// Throws std::invalid_argument if `initial_position` does not match the
/// target's declared structure, PreconditionError if the initial
/// log-density is not finite, and std::logic_error if a step changes the
/// state structure.
McmcRun mcmc(std::size_t num_samples, const SamplingAlgorithm& algorithm,
             const TargetLogDensity& target, const Position& initial_position,
             const RngKey& seed);

/// Fraction of accepted steps for each record of the depth-first flattened
/// info. Throws UnsupportedInfoError if a record lacks `is_accepted`.
std::vector<double> acceptance_rate(const McmcRun& run);
std::vector<double> acceptance_rate(const InfoTrace& infos, std::size_t begin = 0);

struct ParameterSummary {
  std::string label;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
  double ess = 0.0;
};

/// Per flattened element (labels as TraceBuffer::column_labels) over rows
/// [burn_in, num_samples). Throws std::out_of_range if burn_in is not less
/// than the number of samples.
std::vector<ParameterSummary> summarize(const TraceBuffer& samples, std::size_t burn_in);
inline std::vector<ParameterSummary> summarize(const McmcRun& run, std::size_t burn_in) {
  return summarize(run.samples, burn_in);
}

}  // namespace mwg
