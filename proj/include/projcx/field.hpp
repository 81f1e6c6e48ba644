#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "projcx/error.hpp"

namespace projcx {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class FieldKind { prime, rational };

/// Either GF(p) for a prime p < 2^63, or the rationals.
class Field {
public:
  /// Throws bad_parameters unless p is prime and below 2^63.
  static Field prime(std::uint64_t p);
  static Field rationals() { return Field(FieldKind::rational, 0); }

  FieldKind kind() const noexcept { return kind_; }
  bool is_prime() const noexcept { return kind_ == FieldKind::prime; }
  /// Zero for the rationals.
  std::uint64_t modulus() const noexcept { return modulus_; }

  /// `gf P` or `q`, the header syntax of the SLP format.
  std::string describe() const;

  friend bool operator==(const Field&, const Field&) = default;

private:
  Field(FieldKind kind, std::uint64_t modulus) : kind_(kind), modulus_(modulus) {}

  FieldKind kind_;
  std::uint64_t modulus_;
};

bool is_prime(std::uint64_t n);

/// The field used for randomized identity testing unless told otherwise.
inline constexpr std::uint64_t kMersenne31 = 2147483647ULL;

/// An element of a Field in canonical form: a residue in [0, p) for prime
/// fields, a reduced fraction with positive denominator for the rationals.
class FieldElem {
public:
  FieldElem(Field field, std::int64_t value);
  FieldElem(Field field, const Rational& value);

  static FieldElem zero(Field field) { return FieldElem(field, std::int64_t{0}); }
  static FieldElem one(Field field) { return FieldElem(field, std::int64_t{1}); }

  const Field& field() const noexcept { return field_; }
  bool is_zero() const;
  bool is_one() const;

  /// Canonical residue; only valid for prime fields.
  std::uint64_t residue() const;
  /// Only valid for the rationals.
  const Rational& rational() const;

  FieldElem operator-() const;
  FieldElem inverse() const;

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b);
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b);
  FieldElem& operator+=(const FieldElem& b) { return *this = *this + b; }
  FieldElem& operator*=(const FieldElem& b) { return *this = *this * b; }

  friend bool operator==(const FieldElem& a, const FieldElem& b);

  /// Decimal residue for prime fields, `a/b` (or `a`) for rationals.
  std::string to_string() const;

private:
  Field field_;
  std::variant<std::uint64_t, Rational> value_;
};

std::ostream& operator<<(std::ostream& os, const FieldElem& e);

enum class ArithOp { add, sub, mul, div };

/// Checked field arithmetic; throws mixed_fields or division_by_zero.
FieldElem arith(const FieldElem& a, const FieldElem& b, ArithOp op);

/// Parses a field-element literal (`-3`, `9`, `2/3`) into `field`, reducing
/// modulo p where needed.
FieldElem parse_elem(Field field, std::string_view text);

/// Parses `gf:P`, `gf P` or `q`.
Field parse_field(std::string_view text);

/// Uniform element of GF(p), a pure function of the seed. Throws
/// unsupported_field for the rationals.
FieldElem sample_uniform(Field field, std::uint64_t seed);

/// Maps an element into another field: identity on equal fields, reduction
/// Q -> GF(p) otherwise. Throws field_mismatch for GF(p) -> GF(q), p != q and
/// division_by_zero when a denominator vanishes mod p.
FieldElem convert(const FieldElem& e, Field target);

// Raw modular helpers shared by the fast evaluation paths.
inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;  // p < 2^63 so no wrap
  return s >= p ? s - p : s;
}
inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return a >= b ? a - b : a + (p - b);
}
inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

}  // namespace projcx
