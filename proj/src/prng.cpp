#include "mwg/prng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mwg {
namespace {

constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;
constexpr int kRotations[8][2] = {{14, 16}, {52, 57}, {23, 40}, {5, 37},
                                  {25, 33}, {46, 12}, {58, 22}, {32, 32}};

// Domain tags keep the counter spaces of the different derivations disjoint.
constexpr std::uint64_t kTagSeed = 0x73656564ULL;
constexpr std::uint64_t kTagSplit = 0x73706c6974ULL;
constexpr std::uint64_t kTagFold = 0x666f6c64ULL;
constexpr std::uint64_t kTagStream = 0x73747265616dULL;

constexpr std::uint64_t rotl(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

std::size_t checked_count(const Shape& shape) { return num_elements(shape); }

}  // namespace

std::array<std::uint64_t, 4> threefry4x64(const std::array<std::uint64_t, 4>& key,
                                          const std::array<std::uint64_t, 4>& counter) {
  std::array<std::uint64_t, 5> ks{key[0], key[1], key[2], key[3],
                                  kParity ^ key[0] ^ key[1] ^ key[2] ^ key[3]};
  std::array<std::uint64_t, 4> x{};
  for (int i = 0; i < 4; ++i) x[i] = counter[i] + ks[i];

  for (int round = 0; round < 20; ++round) {
    const auto& rot = kRotations[round % 8];
    if (round % 2 == 0) {
      x[0] += x[1];
      x[1] = rotl(x[1], rot[0]) ^ x[0];
      x[2] += x[3];
      x[3] = rotl(x[3], rot[1]) ^ x[2];
    } else {
      x[0] += x[3];
      x[3] = rotl(x[3], rot[0]) ^ x[0];
      x[2] += x[1];
      x[1] = rotl(x[1], rot[1]) ^ x[2];
    }
    if (round % 4 == 3) {
      const std::uint64_t s = static_cast<std::uint64_t>(round + 1) / 4;
      for (int i = 0; i < 4; ++i) x[i] += ks[(s + i) % 5];
      x[3] += s;
    }
  }
  return x;
}

RngKey key_from_seed(std::uint64_t seed) {
  return RngKey(threefry4x64({0, 0, 0, 0}, {seed, kTagSeed, 0, 0}));
}

std::vector<RngKey> split(const RngKey& key, std::size_t n) {
  if (n == 0) throw std::invalid_argument("split: n must be at least 1");
  std::vector<RngKey> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(threefry4x64(key.words(), {static_cast<std::uint64_t>(i), kTagSplit, 0, 0}));
  }
  return out;
}

RngKey fold_in(const RngKey& key, std::uint64_t data) {
  return RngKey(threefry4x64(key.words(), {data, kTagFold, 0, 0}));
}

std::uint64_t RandomStream::next_u64() {
  if (used_ == 4) {
    block_ = threefry4x64(key_.words(), {counter_++, kTagStream, 0, 0});
    used_ = 0;
  }
  return block_[used_++];
}

double RandomStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::next_open_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = next_open_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_normal_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      product = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

std::int64_t RandomStream::next_binomial(std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("next_binomial: requires n >= 0 and p in [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double odds = p / (1.0 - p);
  const auto mode =
      std::min<std::int64_t>(n, static_cast<std::int64_t>(std::floor((n + 1) * p)));
  const double log_pmf_mode = std::lgamma(n + 1.0) - std::lgamma(mode + 1.0) -
                              std::lgamma(static_cast<double>(n - mode) + 1.0) + mode * log_p +
                              (n - mode) * log_q;

  double u = next_uniform();
  const double pmf_mode = std::exp(log_pmf_mode);
  u -= pmf_mode;
  if (u <= 0.0) return mode;

  std::int64_t hi = mode;
  std::int64_t lo = mode;
  double pmf_hi = pmf_mode;
  double pmf_lo = pmf_mode;
  while (hi < n || lo > 0) {
    if (hi < n) {
      pmf_hi *= odds * static_cast<double>(n - hi) / static_cast<double>(hi + 1);
      ++hi;
      u -= pmf_hi;
      if (u <= 0.0) return hi;
    }
    if (lo > 0) {
      pmf_lo *= static_cast<double>(lo) / (odds * static_cast<double>(n - lo + 1));
      --lo;
      u -= pmf_lo;
      if (u <= 0.0) return lo;
    }
  }
  // Rounding left a sliver of mass unassigned.
  return mode;
}

std::vector<double> uniform(const RngKey& key, double lo, double hi, std::size_t count) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("uniform: requires finite lo < hi");
  }
  RandomStream stream(key);
  std::vector<double> out(count);
  for (auto& v : out) v = lo + (hi - lo) * stream.next_uniform();
  return out;
}

std::vector<double> standard_normal(const RngKey& key, std::size_t count) {
  RandomStream stream(key);
  std::vector<double> out(count);
  for (auto& v : out) v = stream.next_normal();
  return out;
}

std::vector<bool> bernoulli(const RngKey& key, double p, std::size_t count) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("bernoulli: p must lie in [0, 1], got " + std::to_string(p));
  }
  RandomStream stream(key);
  std::vector<bool> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = stream.next_uniform() < p;
  return out;
}

std::vector<std::int64_t> integer_uniform(const RngKey& key, std::int64_t lo,
                                          std::int64_t hi_exclusive, std::size_t count) {
  if (!(lo < hi_exclusive)) {
    throw std::invalid_argument("integer_uniform: requires lo < hi_exclusive");
  }
  RandomStream stream(key);
  const auto width = static_cast<std::uint64_t>(hi_exclusive - lo);
  std::vector<std::int64_t> out(count);
  for (auto& v : out) v = lo + static_cast<std::int64_t>(stream.next_below(width));
  return out;
}

Tensor sample_primitive(const RngKey& key, const DistributionSpec& spec) {
  return std::visit(
      [&](const auto& d) -> Tensor {
        using D = std::decay_t<decltype(d)>;
        const auto count = checked_count(d.shape);
        if constexpr (std::is_same_v<D, dist::Uniform>) {
          return Tensor(d.shape, uniform(key, d.lo, d.hi, count));
        } else if constexpr (std::is_same_v<D, dist::StandardNormal>) {
          return Tensor(d.shape, standard_normal(key, count));
        } else if constexpr (std::is_same_v<D, dist::Bernoulli>) {
          const auto flags = bernoulli(key, d.p, count);
          return Tensor(d.shape, std::vector<std::int64_t>(flags.begin(), flags.end()));
        } else {
          return Tensor(d.shape, integer_uniform(key, d.lo, d.hi_exclusive, count));
        }
      },
      spec);
}

}  // namespace mwg
