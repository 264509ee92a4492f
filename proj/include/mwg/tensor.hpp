#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mwg {

using Shape = std::vector<std::size_t>;

std::size_t num_elements(const Shape& shape);
std::string shape_to_string(const Shape& shape);

enum class ElementKind { real, integer };

/// Dense row-major tensor holding either reals or integers.
class Tensor {
 public:
  Tensor() : Tensor(ElementKind::real, Shape{}) {}
  Tensor(ElementKind kind, Shape shape);
  Tensor(Shape shape, std::vector<double> values);
  Tensor(Shape shape, std::vector<std::int64_t> values);

  static Tensor scalar(double value) { return Tensor(Shape{}, std::vector<double>{value}); }
  static Tensor integer_scalar(std::int64_t value) {
    return Tensor(Shape{}, std::vector<std::int64_t>{value});
  }
  static Tensor vector(std::vector<double> values) {
    Shape shape{values.size()};
    return Tensor(std::move(shape), std::move(values));
  }

  ElementKind kind() const {
    return std::holds_alternative<std::vector<double>>(data_) ? ElementKind::real
                                                               : ElementKind::integer;
  }
  bool is_real() const { return kind() == ElementKind::real; }
  const Shape& shape() const { return shape_; }
  std::size_t size() const;

  // Checked accessors; throw std::invalid_argument on kind mismatch.
  const std::vector<double>& reals() const;
  std::vector<double>& reals();
  const std::vector<std::int64_t>& integers() const;
  std::vector<std::int64_t>& integers();

  /// Value of a one-element real tensor.
  double item() const;
  /// Element as double regardless of kind.
  double as_double(std::size_t flat_index) const;

  bool same_structure(const Tensor& other) const {
    return shape_ == other.shape_ && kind() == other.kind();
  }

  /// Bitwise equality (NaN payloads and signed zeros distinguished).
  bool bitwise_equal(const Tensor& other) const;

 private:
  Shape shape_;
  std::variant<std::vector<double>, std::vector<std::int64_t>> data_;
};

}  // namespace mwg
