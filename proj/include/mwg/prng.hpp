#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "mwg/tensor.hpp"

namespace mwg {

/// Splittable, counter-based random key.
///
/// A key is an immutable 256-bit value. Randomness is obtained by hashing
/// (key, counter) pairs through Threefry-4x64-20, so a key can be split into
/// independent children or expanded into a stream without any shared mutable
/// state.
class RngKey {
 public:
  using Words = std::array<std::uint64_t, 4>;

  constexpr RngKey() = default;
  constexpr explicit RngKey(const Words& words) : words_(words) {}

  const Words& words() const { return words_; }

  friend bool operator==(const RngKey&, const RngKey&) = default;

 private:
  Words words_{};
};

/// Threefry-4x64 with 20 rounds. Exposed for known-answer testing.
std::array<std::uint64_t, 4> threefry4x64(const std::array<std::uint64_t, 4>& key,
                                          const std::array<std::uint64_t, 4>& counter);

RngKey key_from_seed(std::uint64_t seed);

/// Splits into n children. Throws std::invalid_argument for n == 0.
std::vector<RngKey> split(const RngKey& key, std::size_t n);

/// Derives the child for index `data` without materializing a split.
RngKey fold_in(const RngKey& key, std::uint64_t data);

/// Sequential view over the random bits of a key. Each stream is a pure
/// function of its key; the stream object itself only holds a counter.
class RandomStream {
 public:
  explicit RandomStream(const RngKey& key) : key_(key) {}

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double next_uniform();
  /// Uniform on (0, 1).
  double next_open_uniform();
  double next_normal();
  /// Uniform on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);
  /// Binomial(n, p) by mode-centred chop-down inversion.
  std::int64_t next_binomial(std::int64_t n, double p);

 private:
  RngKey key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Primitive samplers. All are deterministic in (key, arguments) and throw
// std::invalid_argument on invalid bounds or probabilities.

std::vector<double> uniform(const RngKey& key, double lo, double hi, std::size_t count);
std::vector<double> standard_normal(const RngKey& key, std::size_t count);
std::vector<bool> bernoulli(const RngKey& key, double p, std::size_t count);
std::vector<std::int64_t> integer_uniform(const RngKey& key, std::int64_t lo,
                                          std::int64_t hi_exclusive, std::size_t count);

namespace dist {
struct Uniform {
  double lo;
  double hi;
  Shape shape;
};
struct StandardNormal {
  Shape shape;
};
struct Bernoulli {
  double p;
  Shape shape;
};
/// Integers in [lo, hi_exclusive).
struct IntegerUniform {
  std::int64_t lo;
  std::int64_t hi_exclusive;
  Shape shape;
};
}  // namespace dist

using DistributionSpec =
    std::variant<dist::Uniform, dist::StandardNormal, dist::Bernoulli, dist::IntegerUniform>;

/// Draws a tensor of the requested shape. Bernoulli results are integer 0/1.
Tensor sample_primitive(const RngKey& key, const DistributionSpec& spec);

}  // namespace mwg
