#include "mwg/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mwg/diagnostics.hpp"
#include "mwg/kernels.hpp"

namespace mwg {

McmcRun mcmc(std::size_t num_samples, const SamplingAlgorithm& algorithm,
             const TargetLogDensity& target, const Position& initial_position,
             const RngKey& seed) {
  if (num_samples == 0) throw std::invalid_argument("mcmc: num_samples must be positive");
  if (!target.accepts(initial_position)) {
    throw std::invalid_argument("mcmc: initial position " + initial_position.describe() +
                                " does not match the target structure " +
                                target.declared().describe());
  }
  const auto started = std::chrono::steady_clock::now();

  ChainAndKernelState state = algorithm.init(target, initial_position);
  if (!std::isfinite(state.chain.log_density)) {
    throw PreconditionError("mcmc: initial log-density is not finite at " +
                            initial_position.describe());
  }

  McmcRun run{TraceBuffer(initial_position, num_samples), InfoTrace(num_samples),
              RunMeta{seed, num_samples, 0.0}, {}};
  for (std::size_t i = 0; i < num_samples; ++i) {
    auto result = algorithm.step(target, state, fold_in(seed, i));
    if (!same_structure(result.state, state)) {
      throw std::logic_error("mcmc: step " + std::to_string(i) + " changed the state structure");
    }
    state = std::move(result.state);
    run.samples.write(i, state.chain.position);
    run.infos.write(i, result.info);
  }
  run.final_state = std::move(state);
  run.meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return run;
}

std::vector<double> acceptance_rate(const InfoTrace& infos, std::size_t begin) {
  const std::size_t n = infos.num_samples();
  if (begin >= n) throw std::out_of_range("acceptance_rate: begin beyond the trace");
  std::vector<double> rates;
  for (std::size_t k = 0; k < infos.num_leaves(); ++k) {
    const auto& leaf = infos.leaf(k);
    if (!leaf.prototype().contains("is_accepted")) {
      throw UnsupportedInfoError("acceptance_rate: info record " + std::to_string(k) +
                                 " has no is_accepted field");
    }
    const auto flags = leaf.column("is_accepted");
    const double accepted = std::count_if(flags.begin() + static_cast<std::ptrdiff_t>(begin),
                                          flags.end(), [](double f) { return f != 0.0; });
    rates.push_back(accepted / static_cast<double>(n - begin));
  }
  return rates;
}

std::vector<double> acceptance_rate(const McmcRun& run) { return acceptance_rate(run.infos); }

std::vector<ParameterSummary> summarize(const TraceBuffer& samples, std::size_t burn_in) {
  if (burn_in >= samples.num_samples()) {
    throw std::out_of_range("summarize: burn_in " + std::to_string(burn_in) +
                            " leaves no samples out of " + std::to_string(samples.num_samples()));
  }
  std::vector<ParameterSummary> out;
  const auto labels = samples.column_labels();
  std::size_t label_index = 0;
  for (const auto& [name, proto] : samples.prototype().entries()) {
    for (std::size_t element = 0; element < proto.size(); ++element) {
      auto column = samples.column(name, element);
      std::vector<double> kept(column.begin() + static_cast<std::ptrdiff_t>(burn_in), column.end());
      ParameterSummary s;
      s.label = labels[label_index++];
      s.mean = sample_mean(kept);
      s.sd = std::sqrt(sample_variance(kept));
      s.ess = effective_sample_size(kept);
      std::sort(kept.begin(), kept.end());
      s.q025 = quantile_sorted(kept, 0.025);
      s.q50 = quantile_sorted(kept, 0.5);
      s.q975 = quantile_sorted(kept, 0.975);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace mwg
