#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mwg/prng.hpp"
#include "mwg/state.hpp"
#include "mwg/target.hpp"

namespace mwg {

struct StepResult {
  ChainAndKernelState state;
  Info info;
};

/// One MCMC transition kernel as a pair of pure functions.
///
/// `init` builds the chain and kernel state for a starting position; `step`
/// advances it by one transition given an explicit key. Neither may keep
/// hidden state: identical arguments give bit-identical results, and `step`
/// returns a state with the same structure it received.
///
/// Sequential composition (`then`, `>>`) keeps a flat list of components so
/// that `(a >> b) >> c` and `a >> (b >> c)` are the same kernel.
class SamplingAlgorithm {
 public:
  using InitFn = std::function<ChainAndKernelState(const TargetLogDensity&, const Position&)>;
  using StepFn = std::function<StepResult(const TargetLogDensity&, const ChainAndKernelState&,
                                          const RngKey&)>;

  /// `num_kernel_states` is the length of the KernelState sequence that
  /// `init` produces.
  SamplingAlgorithm(InitFn init, StepFn step, std::size_t num_kernel_states = 1);

  ChainAndKernelState init(const TargetLogDensity& target, const Position& position) const;
  StepResult step(const TargetLogDensity& target, const ChainAndKernelState& state,
                  const RngKey& key) const;

  std::size_t num_kernel_states() const { return impl_->num_kernel_states; }

  /// Components of a sequential composite; a single-element list holding
  /// this algorithm otherwise.
  std::vector<SamplingAlgorithm> components() const;

  SamplingAlgorithm then(const SamplingAlgorithm& next) const;

 private:
  struct Impl {
    InitFn init;
    StepFn step;
    std::size_t num_kernel_states;
    std::vector<SamplingAlgorithm> components;  // empty unless composite
  };

  explicit SamplingAlgorithm(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static SamplingAlgorithm sequence(std::vector<SamplingAlgorithm> components);

  std::shared_ptr<const Impl> impl_;
};

/// Runs `first` then `second`. The composite's key is split left to right
/// into one sub-key per component; its info is the flattened sequence of
/// component infos and its kernel state the flattened sequence of component
/// kernel states. All components initialize from the same position.
inline SamplingAlgorithm then(const SamplingAlgorithm& first, const SamplingAlgorithm& second) {
  return first.then(second);
}

inline SamplingAlgorithm operator>>(const SamplingAlgorithm& first,
                                    const SamplingAlgorithm& second) {
  return first.then(second);
}

/// Lifts a kernel over the entries `target_names` to the global position.
///
/// Each step projects out the targeted entries, conditions the target on
/// the rest, re-evaluates the local log-density under that conditional, runs
/// the wrapped kernel and writes the updated entries back. Untargeted entries
/// are never read by the wrapped kernel nor modified.
///
/// Throws std::invalid_argument for empty or duplicated names; init throws
/// KeyError for names missing from the position.
SamplingAlgorithm mwg_step(const SamplingAlgorithm& algorithm,
                           std::vector<std::string> target_names);

/// Applies `algorithm` n times per step with n sub-keys split from the step
/// key. Reports only the final inner iteration's info, wrapped as a single
/// element. Throws std::invalid_argument for n == 0.
SamplingAlgorithm multi_scan(std::size_t n, const SamplingAlgorithm& algorithm);

}  // namespace mwg
