#include <bit>
#include <stdexcept>

#include "mwg/state.hpp"

namespace mwg {

Info Info::leaf(Record record) {
  Info out;
  out.kind_ = Kind::record;
  out.record_ = std::move(record);
  return out;
}

Info Info::sequence(std::vector<Info> children) {
  Info out;
  out.kind_ = Kind::sequence;
  for (auto& child : children) {
    if (child.kind_ == Kind::sequence) {
      for (auto& grandchild : child.children_) out.children_.push_back(std::move(grandchild));
    } else {
      out.children_.push_back(std::move(child));
    }
  }
  return out;
}

Info Info::scan(Info inner) {
  Info out;
  out.kind_ = Kind::scan;
  out.children_.push_back(std::move(inner));
  return out;
}

const Record& Info::record() const {
  if (kind_ != Kind::record) throw std::logic_error("info node is not a record");
  return record_;
}

std::size_t Info::length() const { return kind_ == Kind::sequence ? children_.size() : 1; }

const Info& Info::operator[](std::size_t i) const {
  if (kind_ != Kind::sequence) {
    if (i != 0) throw std::out_of_range("info index out of range");
    return *this;
  }
  return children_.at(i);
}

std::vector<Record> Info::leaves() const {
  if (kind_ == Kind::record) return {record_};
  std::vector<Record> out;
  for (const auto& child : children_) {
    auto sub = child.leaves();
    out.insert(out.end(), std::make_move_iterator(sub.begin()), std::make_move_iterator(sub.end()));
  }
  return out;
}

bool Info::same_structure(const Info& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::record) return record_.same_structure(other.record_);
  if (children_.size() != other.children_.size()) return false;
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (!children_[i].same_structure(other.children_[i])) return false;
  }
  return true;
}

bool Info::bitwise_equal(const Info& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::record) return record_.bitwise_equal(other.record_);
  if (children_.size() != other.children_.size()) return false;
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (!children_[i].bitwise_equal(other.children_[i])) return false;
  }
  return true;
}

bool same_structure(const ChainAndKernelState& a, const ChainAndKernelState& b) {
  if (!a.chain.position.same_structure(b.chain.position)) return false;
  if (!a.chain.log_density_grad.same_structure(b.chain.log_density_grad)) return false;
  if (a.kernel.size() != b.kernel.size()) return false;
  for (std::size_t i = 0; i < a.kernel.size(); ++i) {
    if (!a.kernel[i].same_structure(b.kernel[i])) return false;
  }
  return true;
}

bool bitwise_equal(const ChainAndKernelState& a, const ChainAndKernelState& b) {
  if (!same_structure(a, b)) return false;
  if (std::bit_cast<std::uint64_t>(a.chain.log_density) !=
      std::bit_cast<std::uint64_t>(b.chain.log_density)) {
    return false;
  }
  if (!a.chain.position.bitwise_equal(b.chain.position)) return false;
  for (std::size_t i = 0; i < a.kernel.size(); ++i) {
    if (!a.kernel[i].bitwise_equal(b.kernel[i])) return false;
  }
  return true;
}

}  // namespace mwg
