#include "mwg/trace.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mwg {
namespace {

constexpr char kMagic[4] = {'M', 'W', 'G', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "binary trace IO assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("trace dump truncated");
  return value;
}

Shape with_leading(std::size_t n, const Shape& shape) {
  Shape out{n};
  out.insert(out.end(), shape.begin(), shape.end());
  return out;
}

}  // namespace

TraceBuffer::TraceBuffer(const Position& prototype, std::size_t num_samples)
    : prototype_(prototype), num_samples_(num_samples) {
  columns_.reserve(prototype.size());
  for (const auto& [name, tensor] : prototype.entries()) {
    columns_.emplace_back(tensor.kind(), with_leading(num_samples, tensor.shape()));
  }
}

void TraceBuffer::check_index(std::size_t index) const {
  if (index >= num_samples_) {
    throw std::out_of_range("trace index " + std::to_string(index) + " out of range for " +
                            std::to_string(num_samples_) + " samples");
  }
}

void TraceBuffer::write(std::size_t index, const Position& position) {
  check_index(index);
  if (!position.same_structure(prototype_)) {
    throw std::invalid_argument("trace write: structure " + position.describe() +
                                " differs from prototype " + prototype_.describe());
  }
  const auto& entries = position.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Tensor& value = entries[k].second;
    const std::size_t n = value.size();
    if (value.is_real()) {
      std::memcpy(columns_[k].reals().data() + index * n, value.reals().data(), n * sizeof(double));
    } else {
      std::memcpy(columns_[k].integers().data() + index * n, value.integers().data(),
                  n * sizeof(std::int64_t));
    }
  }
}

Position TraceBuffer::read(std::size_t index) const {
  check_index(index);
  Position out;
  const auto& entries = prototype_.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& [name, proto] = entries[k];
    const std::size_t n = proto.size();
    if (proto.is_real()) {
      const auto* begin = columns_[k].reals().data() + index * n;
      out.insert(name, Tensor(proto.shape(), std::vector<double>(begin, begin + n)));
    } else {
      const auto* begin = columns_[k].integers().data() + index * n;
      out.insert(name, Tensor(proto.shape(), std::vector<std::int64_t>(begin, begin + n)));
    }
  }
  return out;
}

std::vector<std::string> TraceBuffer::column_labels() const {
  std::vector<std::string> labels;
  for (const auto& [name, proto] : prototype_.entries()) {
    if (proto.size() == 1) {
      labels.push_back(name);
    } else {
      for (std::size_t i = 0; i < proto.size(); ++i) labels.push_back(name + "." + std::to_string(i));
    }
  }
  return labels;
}

std::vector<double> TraceBuffer::row_values(std::size_t index) const {
  check_index(index);
  std::vector<double> out;
  const auto& entries = prototype_.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::size_t n = entries[k].second.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back(columns_[k].as_double(index * n + i));
  }
  return out;
}

std::vector<double> TraceBuffer::column(const std::string& name, std::size_t flat_index) const {
  const auto& entries = prototype_.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].first != name) continue;
    const std::size_t n = entries[k].second.size();
    if (flat_index >= n) throw std::out_of_range("column element index out of range");
    std::vector<double> out(num_samples_);
    for (std::size_t row = 0; row < num_samples_; ++row) {
      out[row] = columns_[k].as_double(row * n + flat_index);
    }
    return out;
  }
  throw KeyError(name);
}

void TraceBuffer::write_binary(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint64_t>(out, num_samples_);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(prototype_.size()));
  for (const auto& [name, proto] : prototype_.entries()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put<std::uint8_t>(out, proto.is_real() ? 0 : 1);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(proto.shape().size()));
    for (auto dim : proto.shape()) put<std::uint64_t>(out, dim);
  }
  const auto& entries = prototype_.entries();
  for (std::size_t row = 0; row < num_samples_; ++row) {
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::size_t n = entries[k].second.size();
      if (entries[k].second.is_real()) {
        out.write(reinterpret_cast<const char*>(columns_[k].reals().data() + row * n),
                  static_cast<std::streamsize>(n * sizeof(double)));
      } else {
        out.write(reinterpret_cast<const char*>(columns_[k].integers().data() + row * n),
                  static_cast<std::streamsize>(n * sizeof(std::int64_t)));
      }
    }
  }
  if (!out) throw std::runtime_error("failed writing trace dump");
}

TraceBuffer TraceBuffer::read_binary(std::istream& in) {
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw std::runtime_error("not a trace dump (bad magic)");
  }
  if (get<std::uint32_t>(in) != kFormatVersion) {
    throw std::runtime_error("unsupported trace dump version");
  }
  const auto num_samples = get<std::uint64_t>(in);
  const auto num_entries = get<std::uint32_t>(in);
  Position prototype;
  for (std::uint32_t k = 0; k < num_entries; ++k) {
    std::string name(get<std::uint32_t>(in), '\0');
    in.read(name.data(), static_cast<std::streamsize>(name.size()));
    const auto kind = get<std::uint8_t>(in) == 0 ? ElementKind::real : ElementKind::integer;
    Shape shape(get<std::uint32_t>(in));
    for (auto& dim : shape) dim = get<std::uint64_t>(in);
    prototype.insert(std::move(name), Tensor(kind, std::move(shape)));
  }
  TraceBuffer buffer(prototype, num_samples);
  const auto& entries = prototype.entries();
  for (std::size_t row = 0; row < num_samples; ++row) {
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const std::size_t n = entries[k].second.size();
      if (entries[k].second.is_real()) {
        in.read(reinterpret_cast<char*>(buffer.columns_[k].reals().data() + row * n),
                static_cast<std::streamsize>(n * sizeof(double)));
      } else {
        in.read(reinterpret_cast<char*>(buffer.columns_[k].integers().data() + row * n),
                static_cast<std::streamsize>(n * sizeof(std::int64_t)));
      }
      if (!in) throw std::runtime_error("trace dump truncated");
    }
  }
  return buffer;
}

bool TraceBuffer::bitwise_equal(const TraceBuffer& other) const {
  if (num_samples_ != other.num_samples_ || !prototype_.same_structure(other.prototype_)) {
    return false;
  }
  for (std::size_t k = 0; k < columns_.size(); ++k) {
    if (!columns_[k].bitwise_equal(other.columns_[k])) return false;
  }
  return true;
}

void InfoTrace::write(std::size_t index, const Info& info) {
  if (index >= num_samples_) throw std::out_of_range("info trace index out of range");
  auto records = info.leaves();
  if (!structure_) {
    structure_ = info;
    leaves_.reserve(records.size());
    for (const auto& record : records) leaves_.emplace_back(record, num_samples_);
  } else if (!structure_->same_structure(info)) {
    throw std::invalid_argument("info structure changed between iterations");
  }
  for (std::size_t k = 0; k < records.size(); ++k) leaves_[k].write(index, records[k]);
}

std::vector<Record> InfoTrace::read(std::size_t index) const {
  std::vector<Record> out;
  out.reserve(leaves_.size());
  for (const auto& leaf : leaves_) out.push_back(leaf.read(index));
  return out;
}

bool InfoTrace::bitwise_equal(const InfoTrace& other) const {
  if (num_samples_ != other.num_samples_ || leaves_.size() != other.leaves_.size()) return false;
  for (std::size_t k = 0; k < leaves_.size(); ++k) {
    if (!leaves_[k].bitwise_equal(other.leaves_[k])) return false;
  }
  return true;
}

}  // namespace mwg
