#pragma once

#include <stdexcept>
#include <string>

namespace mwg {

/// A named entry was requested that does not exist.
class KeyError : public std::out_of_range {
 public:
  explicit KeyError(const std::string& name)
      : std::out_of_range("no entry named '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A documented precondition on a run (rather than on an argument) failed.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A side-information record lacks a field required by the caller.
class UnsupportedInfoError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mwg
