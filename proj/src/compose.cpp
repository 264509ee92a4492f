#include "mwg/compose.hpp"

#include <stdexcept>
#include <unordered_set>

namespace mwg {

SamplingAlgorithm::SamplingAlgorithm(InitFn init, StepFn step, std::size_t num_kernel_states)
    : impl_(std::make_shared<const Impl>(
          Impl{std::move(init), std::move(step), num_kernel_states, {}})) {
  if (!impl_->init || !impl_->step) {
    throw std::invalid_argument("sampling algorithm requires both init and step functions");
  }
}

ChainAndKernelState SamplingAlgorithm::init(const TargetLogDensity& target,
                                            const Position& position) const {
  return impl_->init(target, position);
}

StepResult SamplingAlgorithm::step(const TargetLogDensity& target,
                                   const ChainAndKernelState& state, const RngKey& key) const {
  if (state.kernel.size() != impl_->num_kernel_states) {
    throw std::invalid_argument("step: expected " + std::to_string(impl_->num_kernel_states) +
                                " kernel states, got " + std::to_string(state.kernel.size()));
  }
  return impl_->step(target, state, key);
}

std::vector<SamplingAlgorithm> SamplingAlgorithm::components() const {
  if (impl_->components.empty()) return {*this};
  return impl_->components;
}

SamplingAlgorithm SamplingAlgorithm::then(const SamplingAlgorithm& next) const {
  auto parts = components();
  auto tail = next.components();
  parts.insert(parts.end(), tail.begin(), tail.end());
  return sequence(std::move(parts));
}

SamplingAlgorithm SamplingAlgorithm::sequence(std::vector<SamplingAlgorithm> parts) {
  std::size_t total_states = 0;
  for (const auto& part : parts) total_states += part.num_kernel_states();

  auto init = [parts](const TargetLogDensity& target, const Position& position) {
    ChainAndKernelState out;
    for (const auto& part : parts) {
      auto state = part.init(target, position);
      if (!state.chain.position.same_structure(position)) {
        throw std::invalid_argument(
            "then: component initialized a position whose structure differs from " +
            position.describe());
      }
      out.chain = std::move(state.chain);
      for (auto& record : state.kernel) out.kernel.push_back(std::move(record));
    }
    return out;
  };

  auto step = [parts](const TargetLogDensity& target, const ChainAndKernelState& state,
                      const RngKey& key) {
    const auto keys = split(key, parts.size());
    ChainAndKernelState current{state.chain, {}};
    current.kernel.reserve(state.kernel.size());
    std::vector<Info> infos;
    infos.reserve(parts.size());
    std::size_t offset = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::size_t count = parts[i].num_kernel_states();
      ChainAndKernelState local{std::move(current.chain),
                                KernelState(state.kernel.begin() + offset,
                                            state.kernel.begin() + offset + count)};
      auto result = parts[i].step(target, local, keys[i]);
      current.chain = std::move(result.state.chain);
      for (auto& record : result.state.kernel) current.kernel.push_back(std::move(record));
      infos.push_back(std::move(result.info));
      offset += count;
    }
    return StepResult{std::move(current), Info::sequence(std::move(infos))};
  };

  auto impl = std::make_shared<Impl>(Impl{std::move(init), std::move(step), total_states, {}});
  impl->components = std::move(parts);
  return SamplingAlgorithm(std::shared_ptr<const Impl>(std::move(impl)));
}

SamplingAlgorithm mwg_step(const SamplingAlgorithm& algorithm,
                           std::vector<std::string> target_names) {
  if (target_names.empty()) throw std::invalid_argument("mwg_step: target_names is empty");
  std::unordered_set<std::string> seen;
  for (const auto& name : target_names) {
    if (!seen.insert(name).second) {
      throw std::invalid_argument("mwg_step: duplicate target name '" + name + "'");
    }
  }

  auto init = [algorithm, target_names](const TargetLogDensity& target,
                                        const Position& position) {
    auto [local, rest] = project(position, target_names);
    const auto conditional = condition(target, rest);
    auto state = algorithm.init(conditional, local);
    return ChainAndKernelState{ChainState{position, state.chain.log_density, {}},
                               std::move(state.kernel)};
  };

  auto step = [algorithm, target_names](const TargetLogDensity& target,
                                        const ChainAndKernelState& state, const RngKey& key) {
    auto [local, rest] = project(state.chain.position, target_names);
    const auto conditional = condition(target, rest);
    // Other kernels may have moved the conditioning entries since the cached
    // value was computed.
    const double local_log_density = conditional(local);
    ChainAndKernelState local_state{ChainState{std::move(local), local_log_density, {}},
                                    state.kernel};
    auto result = algorithm.step(conditional, local_state, key);
    ChainState global{state.chain.position.with_updates(result.state.chain.position),
                      result.state.chain.log_density,
                      {}};
    return StepResult{ChainAndKernelState{std::move(global), std::move(result.state.kernel)},
                      std::move(result.info)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step), algorithm.num_kernel_states());
}

SamplingAlgorithm multi_scan(std::size_t n, const SamplingAlgorithm& algorithm) {
  if (n == 0) throw std::invalid_argument("multi_scan: n must be at least 1");

  auto init = [algorithm](const TargetLogDensity& target, const Position& position) {
    return algorithm.init(target, position);
  };
  auto step = [n, algorithm](const TargetLogDensity& target, const ChainAndKernelState& state,
                             const RngKey& key) {
    const auto keys = split(key, n);
    StepResult result{state, Info()};
    for (std::size_t i = 0; i < n; ++i) {
      result = algorithm.step(target, result.state, keys[i]);
    }
    result.info = Info::scan(std::move(result.info));
    return result;
  };
  return SamplingAlgorithm(std::move(init), std::move(step), algorithm.num_kernel_states());
}

}  // namespace mwg
