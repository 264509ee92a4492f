#include "mwg/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mwg {
namespace {

constexpr const char* kProposedPrefix = "proposed_state.";

struct Transition {
  ChainState chain;
  Info info;
};

/// Symmetric-proposal Metropolis decision.
Transition accept_or_reject(const TargetLogDensity& target, const ChainState& current,
                            Position proposed, const RngKey& accept_key) {
  const double proposed_log_density = target(proposed);
  const double log_acceptance = proposed_log_density - current.log_density;
  const bool accepted = metropolis_accept(log_acceptance, accept_key);
  Info info = Info::leaf(make_mh_info(accepted, log_acceptance, proposed));
  if (accepted) return {ChainState{std::move(proposed), proposed_log_density, {}}, std::move(info)};
  return {current, std::move(info)};
}

ChainState initial_chain(const TargetLogDensity& target, const Position& position) {
  flatten_reals(position);  // rejects integer-valued entries
  return ChainState{position, target(position), {}};
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be a positive finite number");
  }
}

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> as_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

bool metropolis_accept(double log_acceptance, const RngKey& key) {
  if (std::isnan(log_acceptance)) return false;
  const double p = log_acceptance >= 0.0 ? 1.0 : std::exp(log_acceptance);
  return bernoulli(key, p, 1)[0];
}

Record make_mh_info(bool accepted, double log_acceptance, const Position& proposed) {
  Record info{{"is_accepted", Tensor::integer_scalar(accepted ? 1 : 0)},
              {"log_acceptance", Tensor::scalar(log_acceptance)}};
  for (const auto& [name, tensor] : proposed.entries()) info.insert(kProposedPrefix + name, tensor);
  return info;
}

bool info_is_accepted(const Record& info) {
  if (!info.contains("is_accepted")) {
    throw UnsupportedInfoError("info record " + info.describe() + " has no is_accepted field");
  }
  return info.at("is_accepted").as_double(0) != 0.0;
}

double info_log_acceptance(const Record& info) {
  if (!info.contains("log_acceptance")) {
    throw UnsupportedInfoError("info record has no log_acceptance field");
  }
  return info.at("log_acceptance").as_double(0);
}

Position info_proposed_state(const Record& info) {
  Position out;
  const std::string prefix = kProposedPrefix;
  for (const auto& [name, tensor] : info.entries()) {
    if (name.rfind(prefix, 0) == 0) out.insert(name.substr(prefix.size()), tensor);
  }
  if (out.empty()) throw UnsupportedInfoError("info record has no proposed_state fields");
  return out;
}

SamplingAlgorithm metropolis(double tau) {
  require_positive(tau, "metropolis: tau");

  auto init = [tau](const TargetLogDensity& target, const Position& position) {
    auto chain = initial_chain(target, position);
    const auto d = flatten_reals(position).size();
    Record kernel{{"tau", Tensor::vector(std::vector<double>(d, tau))}};
    return ChainAndKernelState{std::move(chain), {std::move(kernel)}};
  };

  auto step = [](const TargetLogDensity& target, const ChainAndKernelState& state,
                 const RngKey& key) {
    const auto keys = split(key, 2);
    const auto x = flatten_reals(state.chain.position);
    const auto& widths = state.kernel[0].at("tau").reals();
    if (widths.size() != x.size()) throw std::invalid_argument("metropolis: tau has wrong size");

    RandomStream stream(keys[0]);
    std::vector<double> proposal(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double lo = x[i] - widths[i];
      const double hi = x[i] + widths[i];
      proposal[i] = lo + (hi - lo) * stream.next_uniform();
    }
    auto moved = accept_or_reject(target, state.chain,
                                  unflatten_reals(state.chain.position, proposal), keys[1]);
    return StepResult{ChainAndKernelState{std::move(moved.chain), state.kernel},
                      std::move(moved.info)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step));
}

SamplingAlgorithm rwmh(double scale) {
  require_positive(scale, "rwmh: scale");

  auto init = [scale](const TargetLogDensity& target, const Position& position) {
    auto chain = initial_chain(target, position);
    return ChainAndKernelState{std::move(chain), {Record{{"scale", Tensor::scalar(scale)}}}};
  };

  auto step = [](const TargetLogDensity& target, const ChainAndKernelState& state,
                 const RngKey& key) {
    const auto keys = split(key, 2);
    auto x = flatten_reals(state.chain.position);
    const double s = state.kernel[0].at("scale").item();
    RandomStream stream(keys[0]);
    for (auto& v : x) v += s * stream.next_normal();
    auto moved =
        accept_or_reject(target, state.chain, unflatten_reals(state.chain.position, x), keys[1]);
    return StepResult{ChainAndKernelState{std::move(moved.chain), state.kernel},
                      std::move(moved.info)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step));
}

SamplingAlgorithm adaptive_rwmh(double initial_scale, AdaptiveRwmhSettings settings) {
  require_positive(initial_scale, "adaptive_rwmh: initial_scale");
  require_positive(settings.jitter, "adaptive_rwmh: jitter");
  require_positive(settings.scaling, "adaptive_rwmh: scaling");
  if (settings.warmup_steps < 0) throw std::invalid_argument("adaptive_rwmh: negative warmup");

  auto init = [initial_scale](const TargetLogDensity& target, const Position& position) {
    auto chain = initial_chain(target, position);
    const auto x = flatten_reals(position);
    const auto d = x.size();
    Record kernel{{"step_count", Tensor::integer_scalar(0)},
                  {"running_mean", Tensor::vector(x)},
                  {"running_cov", Tensor(ElementKind::real, Shape{d, d})},
                  {"base_scale", Tensor::scalar(initial_scale)}};
    return ChainAndKernelState{std::move(chain), {std::move(kernel)}};
  };

  auto step = [settings](const TargetLogDensity& target, const ChainAndKernelState& state,
                         const RngKey& key) {
    const auto keys = split(key, 2);
    const Record& kernel = state.kernel[0];
    const std::int64_t count = kernel.at("step_count").integers().at(0);
    const double base_scale = kernel.at("base_scale").item();
    const Eigen::VectorXd x = as_vector(flatten_reals(state.chain.position));
    const auto d = x.size();
    const Eigen::VectorXd mean = as_vector(kernel.at("running_mean").reals());
    const Eigen::MatrixXd cov =
        Eigen::Map<const Eigen::MatrixXd>(kernel.at("running_cov").reals().data(), d, d);

    RandomStream stream(keys[0]);
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = stream.next_normal();

    Eigen::VectorXd proposal;
    if (count < settings.warmup_steps) {
      proposal = x + base_scale * z;
    } else {
      const Eigen::MatrixXd proposal_cov =
          (settings.scaling * settings.scaling / static_cast<double>(d)) *
          (cov + settings.jitter * Eigen::MatrixXd::Identity(d, d));
      Eigen::LLT<Eigen::MatrixXd> llt(proposal_cov);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("adaptive_rwmh: proposal covariance is not positive-definite");
      }
      proposal = x + llt.matrixL() * z;
    }

    auto moved = accept_or_reject(
        target, state.chain, unflatten_reals(state.chain.position, as_std(proposal)), keys[1]);

    // One-pass update from the realized (post-decision) position.
    const Eigen::VectorXd next = as_vector(flatten_reals(moved.chain.position));
    const double n1 = static_cast<double>(count + 1);
    const Eigen::VectorXd new_mean = mean + (next - mean) / n1;
    const Eigen::MatrixXd new_cov =
        cov + ((next - mean) * (next - new_mean).transpose() - cov) / n1;

    Record updated{{"step_count", Tensor::integer_scalar(count + 1)},
                   {"running_mean", Tensor::vector(as_std(new_mean))},
                   {"running_cov", Tensor(Shape{static_cast<std::size_t>(d),
                                                static_cast<std::size_t>(d)},
                                          std::vector<double>(new_cov.data(),
                                                              new_cov.data() + new_cov.size()))},
                   {"base_scale", Tensor::scalar(base_scale)}};
    return StepResult{ChainAndKernelState{std::move(moved.chain), {std::move(updated)}},
                      std::move(moved.info)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step));
}

namespace {

Position elementwise_log(const Position& position) {
  Position out;
  for (const auto& [name, tensor] : position.entries()) {
    auto values = tensor.reals();
    for (auto& v : values) {
      if (!(v > 0.0)) {
        throw std::invalid_argument("on_log_scale: entry '" + name + "' is not positive");
      }
      v = std::log(v);
    }
    out.insert(name, Tensor(tensor.shape(), std::move(values)));
  }
  return out;
}

TargetLogDensity log_scale_target(const TargetLogDensity& target) {
  return TargetLogDensity(target.declared(), [target](const Position& u) {
    Position x;
    double log_jacobian = 0.0;
    for (const auto& [name, tensor] : u.entries()) {
      auto values = tensor.reals();
      for (auto& v : values) {
        log_jacobian += v;
        v = std::exp(v);
      }
      x.insert(name, Tensor(tensor.shape(), std::move(values)));
    }
    return target(x) + log_jacobian;
  });
}

}  // namespace

SamplingAlgorithm on_log_scale(const SamplingAlgorithm& algorithm) {
  auto init = [algorithm](const TargetLogDensity& target, const Position& position) {
    auto inner = algorithm.init(log_scale_target(target), elementwise_log(position));
    return ChainAndKernelState{ChainState{position, target(position), {}},
                               std::move(inner.kernel)};
  };

  auto step = [algorithm](const TargetLogDensity& target, const ChainAndKernelState& state,
                          const RngKey& key) {
    const auto transformed = log_scale_target(target);
    Position u = elementwise_log(state.chain.position);
    const double u_log_density = transformed(u);
    auto result = algorithm.step(
        transformed, ChainAndKernelState{ChainState{u, u_log_density, {}}, state.kernel}, key);

    Position x = state.chain.position;
    bool moved = false;
    for (const auto& [name, new_u] : result.state.chain.position.entries()) {
      const auto& old_u = u.at(name).reals();
      auto& values = x.at(name).reals();
      for (std::size_t i = 0; i < values.size(); ++i) {
        if (new_u.reals()[i] != old_u[i]) {
          values[i] = std::exp(new_u.reals()[i]);
          moved = true;
        }
      }
    }
    const double log_density = moved ? target(x) : state.chain.log_density;
    return StepResult{
        ChainAndKernelState{ChainState{std::move(x), log_density, {}},
                            std::move(result.state.kernel)},
        std::move(result.info)};
  };

  return SamplingAlgorithm(std::move(init), std::move(step), algorithm.num_kernel_states());
}

}  // namespace mwg
