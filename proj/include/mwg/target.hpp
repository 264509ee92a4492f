#pragma once

#include <functional>
#include <memory>

#include "mwg/position.hpp"

namespace mwg {

/// Unnormalized log-density over a declared set of named parameters.
///
/// Evaluation checks the argument against the declared structure (names,
/// kinds, shapes; entry order is irrelevant) and returns -inf rather than
/// throwing outside the support.
class TargetLogDensity {
 public:
  using Function = std::function<double(const Position&)>;

  TargetLogDensity(Position declared, Function function);

  /// Throws std::invalid_argument on structural mismatch.
  double operator()(const Position& position) const;

  const Position& declared() const { return *declared_; }

  /// True if `position` carries exactly the declared entries.
  bool accepts(const Position& position) const;

 private:
  std::shared_ptr<const Position> declared_;
  std::shared_ptr<const Function> function_;
};

inline double evaluate(const TargetLogDensity& target, const Position& position) {
  return target(position);
}

/// Unnormalized conditional: the returned density over the remaining names
/// evaluates `target` at merge(free, fixed). Throws KeyError for names the
/// target does not declare and std::invalid_argument if `fixed` covers every
/// declared name or has the wrong structure.
TargetLogDensity condition(const TargetLogDensity& target, const Position& fixed);

}  // namespace mwg
