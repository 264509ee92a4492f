#include "mwg/tensor.hpp"

#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mwg {

std::size_t num_elements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(ElementKind kind, Shape shape) : shape_(std::move(shape)) {
  const auto n = num_elements(shape_);
  if (kind == ElementKind::real) {
    data_ = std::vector<double>(n, 0.0);
  } else {
    data_ = std::vector<std::int64_t>(n, 0);
  }
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (num_elements(shape_) != std::get<0>(data_).size()) {
    throw std::invalid_argument("tensor: value count does not match shape " +
                                shape_to_string(shape_));
  }
}

Tensor::Tensor(Shape shape, std::vector<std::int64_t> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (num_elements(shape_) != std::get<1>(data_).size()) {
    throw std::invalid_argument("tensor: value count does not match shape " +
                                shape_to_string(shape_));
  }
}

std::size_t Tensor::size() const {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

const std::vector<double>& Tensor::reals() const {
  if (!is_real()) throw std::invalid_argument("tensor: expected real elements");
  return std::get<0>(data_);
}

std::vector<double>& Tensor::reals() {
  if (!is_real()) throw std::invalid_argument("tensor: expected real elements");
  return std::get<0>(data_);
}

const std::vector<std::int64_t>& Tensor::integers() const {
  if (is_real()) throw std::invalid_argument("tensor: expected integer elements");
  return std::get<1>(data_);
}

std::vector<std::int64_t>& Tensor::integers() {
  if (is_real()) throw std::invalid_argument("tensor: expected integer elements");
  return std::get<1>(data_);
}

double Tensor::item() const {
  const auto& v = reals();
  if (v.size() != 1) throw std::invalid_argument("tensor: item() requires exactly one element");
  return v[0];
}

double Tensor::as_double(std::size_t flat_index) const {
  if (is_real()) return std::get<0>(data_).at(flat_index);
  return static_cast<double>(std::get<1>(data_).at(flat_index));
}

bool Tensor::bitwise_equal(const Tensor& other) const {
  if (!same_structure(other)) return false;
  return std::visit(
      [&](const auto& mine) {
        using Vec = std::decay_t<decltype(mine)>;
        const auto& theirs = std::get<Vec>(other.data_);
        return mine.empty() ||
               std::memcmp(mine.data(), theirs.data(), mine.size() * sizeof(mine[0])) == 0;
      },
      data_);
}

}  // namespace mwg
