#include "mwg/target.hpp"

#include <stdexcept>

namespace mwg {

TargetLogDensity::TargetLogDensity(Position declared, Function function)
    : declared_(std::make_shared<const Position>(std::move(declared))),
      function_(std::make_shared<const Function>(std::move(function))) {
  if (!*function_) throw std::invalid_argument("target: empty log-density function");
}

bool TargetLogDensity::accepts(const Position& position) const {
  if (position.size() != declared_->size()) return false;
  for (const auto& [name, tensor] : position.entries()) {
    if (!declared_->contains(name) || !declared_->at(name).same_structure(tensor)) return false;
  }
  return true;
}

double TargetLogDensity::operator()(const Position& position) const {
  if (!accepts(position)) {
    throw std::invalid_argument("target: position " + position.describe() +
                                " does not match declared structure " + declared_->describe());
  }
  return (*function_)(position);
}

TargetLogDensity condition(const TargetLogDensity& target, const Position& fixed) {
  const Position& declared = target.declared();
  for (const auto& [name, tensor] : fixed.entries()) {
    if (!declared.at(name).same_structure(tensor)) {
      throw std::invalid_argument("condition: fixed entry '" + name +
                                  "' does not match the declared structure");
    }
  }
  if (fixed.empty()) return target;
  if (fixed.size() >= declared.size()) {
    throw std::invalid_argument("condition: fixing every parameter leaves an empty domain");
  }

  Position free;
  for (const auto& [name, tensor] : declared.entries()) {
    if (!fixed.contains(name)) free.insert(name, tensor);
  }
  return TargetLogDensity(std::move(free), [target, fixed](const Position& position) {
    return target(merge(position, fixed));
  });
}

}  // namespace mwg
