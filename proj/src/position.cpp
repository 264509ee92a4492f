#include "mwg/position.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mwg {

NamedTensors::NamedTensors(std::initializer_list<Entry> entries) {
  for (const auto& [name, tensor] : entries) insert(name, tensor);
}

void NamedTensors::insert(std::string name, Tensor tensor) {
  if (contains(name)) throw std::invalid_argument("duplicate entry name '" + name + "'");
  entries_.emplace_back(std::move(name), std::move(tensor));
}

const Tensor* NamedTensors::find(const std::string& name) const {
  for (const auto& entry : entries_) {
    if (entry.first == name) return &entry.second;
  }
  return nullptr;
}

const Tensor& NamedTensors::at(const std::string& name) const {
  const Tensor* found = find(name);
  if (found == nullptr) throw KeyError(name);
  return *found;
}

Tensor& NamedTensors::at(const std::string& name) {
  return const_cast<Tensor&>(std::as_const(*this).at(name));
}

std::vector<std::string> NamedTensors::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& entry : entries_) out.push_back(entry.first);
  return out;
}

bool NamedTensors::same_structure(const NamedTensors& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].first != other.entries_[i].first ||
        !entries_[i].second.same_structure(other.entries_[i].second)) {
      return false;
    }
  }
  return true;
}

bool NamedTensors::bitwise_equal(const NamedTensors& other) const {
  if (!same_structure(other)) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!entries_[i].second.bitwise_equal(other.entries_[i].second)) return false;
  }
  return true;
}

NamedTensors NamedTensors::with_updates(const NamedTensors& part) const {
  NamedTensors out = *this;
  for (const auto& [name, tensor] : part.entries_) {
    Tensor& slot = out.at(name);
    if (!slot.same_structure(tensor)) {
      throw std::invalid_argument("update of '" + name + "' changes its structure from " +
                                  shape_to_string(slot.shape()) + " to " +
                                  shape_to_string(tensor.shape()));
    }
    slot = tensor;
  }
  return out;
}

std::string NamedTensors::describe() const {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& [name, tensor] = entries_[i];
    if (i > 0) out << ", ";
    out << name << ':';
    if (tensor.size() == 1) {
      out << tensor.as_double(0);
    } else {
      out << (tensor.is_real() ? "real" : "int") << shape_to_string(tensor.shape());
    }
  }
  out << '}';
  return out.str();
}

std::pair<Position, Position> project(const Position& position,
                                      std::span<const std::string> names) {
  std::unordered_set<std::string> wanted;
  Position selected;
  for (const auto& name : names) {
    if (!wanted.insert(name).second) {
      throw std::invalid_argument("project: duplicate name '" + name + "'");
    }
    selected.insert(name, position.at(name));
  }
  Position remainder;
  for (const auto& [name, tensor] : position.entries()) {
    if (!wanted.contains(name)) remainder.insert(name, tensor);
  }
  return {std::move(selected), std::move(remainder)};
}

Position merge(const Position& selected, const Position& remainder) {
  Position out = selected;
  for (const auto& [name, tensor] : remainder.entries()) {
    if (out.contains(name)) throw std::invalid_argument("merge: duplicate name '" + name + "'");
    out.insert(name, tensor);
  }
  return out;
}

std::vector<double> flatten_reals(const Position& position) {
  std::vector<double> out;
  for (const auto& [name, tensor] : position.entries()) {
    if (!tensor.is_real()) {
      throw std::invalid_argument("entry '" + name + "' is integer-valued; expected reals");
    }
    const auto& values = tensor.reals();
    out.insert(out.end(), values.begin(), values.end());
  }
  return out;
}

Position unflatten_reals(const Position& prototype, std::span<const double> values) {
  Position out;
  std::size_t offset = 0;
  for (const auto& [name, tensor] : prototype.entries()) {
    const auto n = num_elements(tensor.shape());
    if (offset + n > values.size()) {
      throw std::invalid_argument("unflatten_reals: too few values");
    }
    out.insert(name, Tensor(tensor.shape(), std::vector<double>(values.begin() + offset,
                                                                values.begin() + offset + n)));
    offset += n;
  }
  if (offset != values.size()) throw std::invalid_argument("unflatten_reals: too many values");
  return out;
}

}  // namespace mwg
