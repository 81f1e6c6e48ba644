#include "projcx/field.hpp"

#include <charconv>
#include <ostream>
#include <random>
#include <sstream>

namespace projcx {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::division_by_zero: return "DivisionByZero";
    case ErrorKind::mixed_fields: return "MixedFields";
    case ErrorKind::unsupported_field: return "UnsupportedField";
    case ErrorKind::cycle_detected: return "CycleDetected";
    case ErrorKind::inhomogeneous_sum: return "InhomogeneousSum";
    case ErrorKind::dangling_output: return "DanglingOutput";
    case ErrorKind::malformed_gate: return "MalformedGate";
    case ErrorKind::field_mismatch: return "FieldMismatch";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::shape_mismatch: return "ShapeMismatch";
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::unknown_gate_ref: return "UnknownGateRef";
    case ErrorKind::duplicate_id: return "DuplicateId";
    case ErrorKind::not_homogeneous: return "NotHomogeneous";
    case ErrorKind::degree_zero_output: return "DegreeZeroOutput";
    case ErrorKind::bad_parameters: return "BadParameters";
    case ErrorKind::resource_limit: return "ResourceLimit";
    case ErrorKind::not_normal_form: return "NotNormalForm";
    case ErrorKind::capacity_exceeded: return "CapacityExceeded";
    case ErrorKind::degree_not_representable: return "DegreeNotRepresentable";
    case ErrorKind::budget_exceeded: return "BudgetExceeded";
    case ErrorKind::not_t_guarded: return "NotTGuarded";
    case ErrorKind::field_too_small: return "FieldTooSmall";
  }
  return "Unknown";
}

// Deterministic Miller-Rabin; these bases suffice for all n < 2^64.
bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t sp : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % sp == 0) return n == sp;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++r;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r && composite; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

Field Field::prime(std::uint64_t p) {
  if (p >= (std::uint64_t{1} << 63) || !projcx::is_prime(p)) {
    throw Error(ErrorKind::bad_parameters, "modulus " + std::to_string(p) + " is not a prime below 2^63");
  }
  return Field(FieldKind::prime, p);
}

std::string Field::describe() const {
  return is_prime() ? "gf " + std::to_string(modulus_) : "q";
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  base %= p;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, p);
    base = mul_mod(base, base, p);
    exp >>= 1;
  }
  return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw Error(ErrorKind::division_by_zero, "zero has no inverse mod " + std::to_string(p));
  return pow_mod(a, p - 2, p);
}

namespace {

std::uint64_t reduce_signed(std::int64_t v, std::uint64_t p) {
  if (v >= 0) return static_cast<std::uint64_t>(v) % p;
  // -(v+1) avoids overflow at INT64_MIN
  std::uint64_t mag = static_cast<std::uint64_t>(-(v + 1)) + 1;
  std::uint64_t r = mag % p;
  return r == 0 ? 0 : p - r;
}

std::uint64_t reduce_big(const BigInt& v, std::uint64_t p) {
  BigInt r = v % p;
  if (r < 0) r += p;
  return static_cast<std::uint64_t>(r);
}

void require_same(const FieldElem& a, const FieldElem& b) {
  if (!(a.field() == b.field())) {
    throw Error(ErrorKind::mixed_fields, a.field().describe() + " vs " + b.field().describe());
  }
}

}  // namespace

FieldElem::FieldElem(Field field, std::int64_t value) : field_(field) {
  if (field.is_prime()) {
    value_ = reduce_signed(value, field.modulus());
  } else {
    value_ = Rational(value);
  }
}

FieldElem::FieldElem(Field field, const Rational& value) : field_(field) {
  if (field.is_prime()) {
    const std::uint64_t p = field.modulus();
    const std::uint64_t num = reduce_big(boost::multiprecision::numerator(value), p);
    const std::uint64_t den = reduce_big(boost::multiprecision::denominator(value), p);
    if (den == 0) throw Error(ErrorKind::division_by_zero, "denominator vanishes mod " + std::to_string(p));
    value_ = mul_mod(num, inv_mod(den, p), p);
  } else {
    value_ = value;
  }
}

bool FieldElem::is_zero() const {
  if (field_.is_prime()) return std::get<std::uint64_t>(value_) == 0;
  return std::get<Rational>(value_) == 0;
}

bool FieldElem::is_one() const {
  if (field_.is_prime()) return std::get<std::uint64_t>(value_) == 1;
  return std::get<Rational>(value_) == 1;
}

std::uint64_t FieldElem::residue() const {
  if (!field_.is_prime()) throw Error(ErrorKind::unsupported_field, "residue() on a rational element");
  return std::get<std::uint64_t>(value_);
}

const Rational& FieldElem::rational() const {
  if (field_.is_prime()) throw Error(ErrorKind::unsupported_field, "rational() on a prime-field element");
  return std::get<Rational>(value_);
}

FieldElem FieldElem::operator-() const { return FieldElem::zero(field_) - *this; }

FieldElem FieldElem::inverse() const { return FieldElem::one(field_) / *this; }

FieldElem operator+(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  FieldElem r = a;
  if (a.field_.is_prime()) {
    r.value_ = add_mod(std::get<std::uint64_t>(a.value_), std::get<std::uint64_t>(b.value_), a.field_.modulus());
  } else {
    r.value_ = std::get<Rational>(a.value_) + std::get<Rational>(b.value_);
  }
  return r;
}

FieldElem operator-(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  FieldElem r = a;
  if (a.field_.is_prime()) {
    r.value_ = sub_mod(std::get<std::uint64_t>(a.value_), std::get<std::uint64_t>(b.value_), a.field_.modulus());
  } else {
    r.value_ = std::get<Rational>(a.value_) - std::get<Rational>(b.value_);
  }
  return r;
}

FieldElem operator*(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  FieldElem r = a;
  if (a.field_.is_prime()) {
    r.value_ = mul_mod(std::get<std::uint64_t>(a.value_), std::get<std::uint64_t>(b.value_), a.field_.modulus());
  } else {
    r.value_ = std::get<Rational>(a.value_) * std::get<Rational>(b.value_);
  }
  return r;
}

FieldElem operator/(const FieldElem& a, const FieldElem& b) {
  require_same(a, b);
  if (b.is_zero()) throw Error(ErrorKind::division_by_zero, "division by zero");
  FieldElem r = a;
  if (a.field_.is_prime()) {
    const std::uint64_t p = a.field_.modulus();
    r.value_ = mul_mod(std::get<std::uint64_t>(a.value_), inv_mod(std::get<std::uint64_t>(b.value_), p), p);
  } else {
    r.value_ = std::get<Rational>(a.value_) / std::get<Rational>(b.value_);
  }
  return r;
}

bool operator==(const FieldElem& a, const FieldElem& b) {
  return a.field_ == b.field_ && a.value_ == b.value_;
}

std::string FieldElem::to_string() const {
  if (field_.is_prime()) return std::to_string(std::get<std::uint64_t>(value_));
  const Rational& q = std::get<Rational>(value_);
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const FieldElem& e) { return os << e.to_string(); }

FieldElem arith(const FieldElem& a, const FieldElem& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  throw Error(ErrorKind::bad_parameters, "unknown arithmetic op");
}

namespace {

BigInt parse_integer(std::string_view text) {
  std::string_view digits = text;
  bool negative = false;
  if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) {
    negative = digits.front() == '-';
    digits.remove_prefix(1);
  }
  if (digits.empty()) throw Error(ErrorKind::syntax_error, "empty integer literal");
  BigInt v = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') throw Error(ErrorKind::syntax_error, "bad integer literal '" + std::string(text) + "'");
    v = v * 10 + (c - '0');
  }
  return negative ? BigInt(-v) : v;
}

}  // namespace

FieldElem parse_elem(Field field, std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return FieldElem(field, Rational(parse_integer(text)));
  const BigInt num = parse_integer(text.substr(0, slash));
  const BigInt den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw Error(ErrorKind::division_by_zero, "literal '" + std::string(text) + "'");
  return FieldElem(field, Rational(num, den));
}

Field parse_field(std::string_view text) {
  if (text == "q" || text == "Q") return Field::rationals();
  std::string_view rest;
  if (text.starts_with("gf:") || text.starts_with("gf ")) {
    rest = text.substr(3);
  } else {
    throw Error(ErrorKind::syntax_error, "field must be 'gf:P' or 'q', got '" + std::string(text) + "'");
  }
  std::uint64_t p = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), p);
  if (ec != std::errc() || ptr != rest.data() + rest.size()) {
    throw Error(ErrorKind::syntax_error, "bad field modulus '" + std::string(rest) + "'");
  }
  return Field::prime(p);
}

FieldElem sample_uniform(Field field, std::uint64_t seed) {
  if (!field.is_prime()) throw Error(ErrorKind::unsupported_field, "cannot sample uniformly from the rationals");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, field.modulus() - 1);
  return FieldElem(field, static_cast<std::int64_t>(dist(rng)));
}

FieldElem convert(const FieldElem& e, Field target) {
  if (e.field() == target) return e;
  if (e.field().is_prime()) {
    throw Error(ErrorKind::field_mismatch, "cannot map " + e.field().describe() + " into " + target.describe());
  }
  return FieldElem(target, e.rational());
}

}  // namespace projcx
