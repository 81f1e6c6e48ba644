#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "projcx/circuit.hpp"

namespace projcx {

/// Exponents of every variable, blocks concatenated in order.
using Monomial = std::vector<std::uint32_t>;

/// Explicit coefficient table of a homogeneous polynomial.
struct DensePoly {
  BlockSpec blocks;
  Field field = Field::rationals();
  MultiDegree degree;
  std::map<Monomial, FieldElem> terms;  // no zero coefficients

  bool is_zero() const { return terms.empty(); }
  FieldElem evaluate(const Assignment& point) const;
  friend bool operator==(const DensePoly& a, const DensePoly& b) { return a.field == b.field && a.terms == b.terms; }
};

inline constexpr std::size_t kDenseBudget = 100000;

/// Coefficients of every output by bottom-up polynomial arithmetic. Throws
/// budget_exceeded when any gate has more than `budget` monomials.
std::vector<DensePoly> dense_expand(const Circuit& c, std::size_t budget = kDenseBudget);

/// `3*x0^2*y1 + ...`
std::string format_poly(const DensePoly& p);

struct PitOptions {
  std::size_t trials = 50;
  /// 0 picks the circuits' field when it is prime, otherwise 2^31 - 1.
  std::uint64_t p = 0;
  std::uint64_t seed = 0;
};

struct PitVerdict {
  bool equal = true;
  std::size_t trials = 0;
  std::size_t pre_trials = 0;  // random points used to detect zero outputs
  bool zeros_by_expansion = false;
  std::uint64_t p = 0;
  std::uint64_t seed = 0;
  std::uint32_t max_degree = 0;
  /// Chance that "equal" is wrong: (D/p)^trials, plus (D/p)^pre_trials for
  /// zero-output detection when it was randomized.
  double error_bound = 0;
  /// Matched output pairs (index in c1, index in c2); -1 marks an output
  /// matched against zero.
  std::vector<std::pair<long, long>> matching;
  /// For "unequal": a point (variables padded to the larger block sizes) and
  /// the output pair that differs there.
  std::optional<RawAssignment> witness;
  std::pair<long, long> witness_outputs{-1, -1};

  /// One-line JSON record.
  std::string to_line() const;
};

/// Randomized identity test. Outputs that are identically zero are skipped on
/// both sides; the remaining ones are paired by multidegree, then by order.
/// Blocks are padded to the larger size (and missing trailing blocks added),
/// so a circuit only reads a prefix of each block. Throws field_too_small when
/// p <= max total output degree.
PitVerdict pit_equal(const Circuit& c1, const Circuit& c2, const PitOptions& options = {});

/// Whether the verdict's witness separates the two circuits under evaluate.
bool recheck_witness(const Circuit& c1, const Circuit& c2, const PitVerdict& v);

}  // namespace projcx
