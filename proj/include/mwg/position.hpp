#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mwg/errors.hpp"
#include "mwg/tensor.hpp"

namespace mwg {

/// Insertion-ordered mapping from unique names to tensors.
///
/// Used for the sampled parameter point and, under the `Record` alias, for
/// kernel-private state and per-step side information.
class NamedTensors {
 public:
  using Entry = std::pair<std::string, Tensor>;

  NamedTensors() = default;
  NamedTensors(std::initializer_list<Entry> entries);

  /// Appends an entry. Throws std::invalid_argument on a duplicate name.
  void insert(std::string name, Tensor tensor);

  bool contains(const std::string& name) const { return find(name) != nullptr; }
  /// Throws KeyError if absent.
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Same names in the same order with matching kinds and shapes.
  bool same_structure(const NamedTensors& other) const;
  bool bitwise_equal(const NamedTensors& other) const;

  /// Copy with the entries of `part` replaced; entry order is preserved.
  /// Throws KeyError for unknown names and std::invalid_argument on a
  /// structure change.
  NamedTensors with_updates(const NamedTensors& part) const;

  std::string describe() const;

 private:
  const Tensor* find(const std::string& name) const;

  std::vector<Entry> entries_;
};

using Position = NamedTensors;
using Record = NamedTensors;

/// Splits `position` into (selected in the order of `names`, remainder in
/// original order). Throws KeyError naming the first missing entry and
/// std::invalid_argument on duplicate names.
std::pair<Position, Position> project(const Position& position,
                                      std::span<const std::string> names);

/// Union of two name-disjoint positions, selected entries first.
/// Throws std::invalid_argument on a shared name.
Position merge(const Position& selected, const Position& remainder);

/// Concatenates all real elements in entry order. Throws
/// std::invalid_argument if any entry holds integers.
std::vector<double> flatten_reals(const Position& position);

/// Inverse of flatten_reals with `prototype` supplying names and shapes.
Position unflatten_reals(const Position& prototype, std::span<const double> values);

}  // namespace mwg
