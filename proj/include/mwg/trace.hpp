#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mwg/position.hpp"
#include "mwg/state.hpp"

namespace mwg {

/// Preallocated storage for `num_samples` positions sharing one structure.
/// Unwritten rows read back as zeros.
class TraceBuffer {
 public:
  TraceBuffer() = default;
  TraceBuffer(const Position& prototype, std::size_t num_samples);

  std::size_t num_samples() const { return num_samples_; }
  const Position& prototype() const { return prototype_; }

  /// Throws std::out_of_range for a bad index and std::invalid_argument when
  /// the structure differs from the prototype.
  void write(std::size_t index, const Position& position);
  Position read(std::size_t index) const;

  /// Flat column labels: `name` for one-element entries, `name.k` otherwise.
  std::vector<std::string> column_labels() const;
  /// All elements of row `index` as doubles, in column order.
  std::vector<double> row_values(std::size_t index) const;
  /// One flattened column over all rows.
  std::vector<double> column(const std::string& name, std::size_t flat_index = 0) const;

  /// Little-endian dump: magic, version, sample count, name table with kinds
  /// and shapes, then row-major samples.
  void write_binary(std::ostream& out) const;
  static TraceBuffer read_binary(std::istream& in);

  bool bitwise_equal(const TraceBuffer& other) const;

 private:
  void check_index(std::size_t index) const;

  Position prototype_;
  std::size_t num_samples_ = 0;
  // Entry k stores rows contiguously: shape {num_samples, prototype shape...}.
  std::vector<Tensor> columns_;
};

/// Per-step side information over a run. The record layout is fixed by the
/// first write; every later write must match it.
class InfoTrace {
 public:
  InfoTrace() = default;
  explicit InfoTrace(std::size_t num_samples) : num_samples_(num_samples) {}

  void write(std::size_t index, const Info& info);
  /// Depth-first records of row `index`.
  std::vector<Record> read(std::size_t index) const;

  std::size_t num_samples() const { return num_samples_; }
  std::size_t num_leaves() const { return leaves_.size(); }
  const TraceBuffer& leaf(std::size_t k) const { return leaves_.at(k); }

  bool bitwise_equal(const InfoTrace& other) const;

 private:
  std::size_t num_samples_ = 0;
  std::optional<Info> structure_;
  std::vector<TraceBuffer> leaves_;
};

}  // namespace mwg
