#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "projcx/field.hpp"

namespace projcx {

/// Fixed-length vector of field elements storing only its nonzero entries.
/// Used where the nominal length (e.g. the edge count of a large universal
/// circuit) is far beyond anything that can be materialized.
class SparseVector {
public:
  SparseVector(Field field, std::uint64_t length) : field_(field), length_(length) {}
  static SparseVector from_dense(Field field, const std::vector<FieldElem>& values);

  const Field& field() const noexcept { return field_; }
  std::uint64_t length() const noexcept { return length_; }
  std::size_t nonzero_count() const noexcept { return entries_.size(); }
  const std::map<std::uint64_t, FieldElem>& nonzeros() const noexcept { return entries_; }
  bool is_zero() const noexcept { return entries_.empty(); }

  FieldElem operator[](std::uint64_t i) const;
  void set(std::uint64_t i, const FieldElem& v);
  void add(std::uint64_t i, const FieldElem& v);

  std::vector<FieldElem> to_dense() const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
  Field field_;
  std::uint64_t length_;
  std::map<std::uint64_t, FieldElem> entries_;
};

}  // namespace projcx
