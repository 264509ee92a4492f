#pragma once

#include "mwg/compose.hpp"

namespace mwg {

// Built-in Metropolis-type kernels over all-real positions. Each returns a
// primitive SamplingAlgorithm whose info is one record with fields
//   is_accepted       integer scalar, 0 or 1
//   log_acceptance    real scalar, log of the (unclamped) acceptance ratio
//   proposed_state.*  the proposed value of every local entry

/// Uniform proposal on [x - tau, x + tau] per element.
/// Kernel state: `tau` (one value per flattened element).
SamplingAlgorithm metropolis(double tau);

/// Gaussian random walk x + scale * z.
/// Kernel state: `scale`.
SamplingAlgorithm rwmh(double scale);

/// Constants of the adaptive random walk.
struct AdaptiveRwmhSettings {
  /// Steps proposed with the isotropic initial scale before the running
  /// covariance is used.
  std::int64_t warmup_steps = 100;
  /// Diagonal jitter added to the running covariance.
  double jitter = 1e-6;
  /// Proposal covariance is scaling^2 / d times the running covariance.
  double scaling = 2.38;
};

/// Random walk whose proposal covariance tracks the running covariance of
/// the realized chain. Kernel state: `step_count`, `running_mean`,
/// `running_cov` (population covariance of the post-step positions visited
/// so far) and `base_scale`.
SamplingAlgorithm adaptive_rwmh(double initial_scale, AdaptiveRwmhSettings settings = {});

/// Runs `algorithm` on the elementwise logarithm of a positive position.
/// The wrapped kernel sees the target pi(exp(u)) + sum(u); elements it does
/// not move are passed back unchanged (no exp/log round trip).
SamplingAlgorithm on_log_scale(const SamplingAlgorithm& algorithm);

/// Accept with probability min(1, exp(log_acceptance)); NaN rejects.
bool metropolis_accept(double log_acceptance, const RngKey& key);

// Accessors for the shared info layout. Throw UnsupportedInfoError when the
// record lacks the field.
bool info_is_accepted(const Record& info);
double info_log_acceptance(const Record& info);
Position info_proposed_state(const Record& info);

Record make_mh_info(bool accepted, double log_acceptance, const Position& proposed);

}  // namespace mwg
