#pragma once

#include <limits>
#include <vector>

#include "mwg/position.hpp"

namespace mwg {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ChainState {
  Position position;
  /// Target log-density at `position`; may be -inf.
  double log_density = kNegInf;
  /// Unused by the shipped kernels; always empty.
  Position log_density_grad;
};

/// Kernel-private state, one record per primitive kernel in composition
/// order. A primitive kernel holds a sequence of length one.
using KernelState = std::vector<Record>;

struct ChainAndKernelState {
  ChainState chain;
  KernelState kernel;
};

/// Per-step side information.
///
/// A node is either a single record, a sequence produced by `then`
/// (flattened on further composition), or the result of `multi_scan`,
/// which wraps the last inner iteration's info as one opaque element.
class Info {
 public:
  enum class Kind { record, sequence, scan };

  Info() : kind_(Kind::sequence) {}
  static Info leaf(Record record);
  static Info sequence(std::vector<Info> children);
  static Info scan(Info inner);

  Kind kind() const { return kind_; }
  const Record& record() const;
  const std::vector<Info>& children() const { return children_; }
  /// Number of top-level elements (1 for a record or scan node).
  std::size_t length() const;
  /// Element i of the top level.
  const Info& operator[](std::size_t i) const;

  /// Depth-first list of all records.
  std::vector<Record> leaves() const;

  bool same_structure(const Info& other) const;
  bool bitwise_equal(const Info& other) const;

 private:
  Kind kind_;
  Record record_;
  std::vector<Info> children_;
};

bool same_structure(const ChainAndKernelState& a, const ChainAndKernelState& b);
bool bitwise_equal(const ChainAndKernelState& a, const ChainAndKernelState& b);

}  // namespace mwg
