#include "projcx/sparse_vector.hpp"

#include <string>

namespace projcx {

SparseVector SparseVector::from_dense(Field field, const std::vector<FieldElem>& values) {
  SparseVector v(field, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v.set(i, values[i]);
  return v;
}

FieldElem SparseVector::operator[](std::uint64_t i) const {
  if (i >= length_) throw Error(ErrorKind::length_mismatch, "index " + std::to_string(i) + " past length " + std::to_string(length_));
  auto it = entries_.find(i);
  return it == entries_.end() ? FieldElem::zero(field_) : it->second;
}

void SparseVector::set(std::uint64_t i, const FieldElem& v) {
  if (i >= length_) throw Error(ErrorKind::length_mismatch, "index " + std::to_string(i) + " past length " + std::to_string(length_));
  if (!(v.field() == field_)) throw Error(ErrorKind::field_mismatch, "sparse vector entry from another field");
  if (v.is_zero()) {
    entries_.erase(i);
  } else {
    entries_.insert_or_assign(i, v);
  }
}

void SparseVector::add(std::uint64_t i, const FieldElem& v) { set(i, (*this)[i] + v); }

std::vector<FieldElem> SparseVector::to_dense() const {
  std::vector<FieldElem> out(length_, FieldElem::zero(field_));
  for (const auto& [i, v] : entries_) out[i] = v;
  return out;
}

}  // namespace projcx
