#pragma once

#include <array>
#include <string>
#include <vector>

#include "projcx/circuit.hpp"

namespace projcx {

/// The six structural conditions of normal multi-homogeneous form:
///   (i)   every leaf is an input variable
///   (ii)  every edge leaving a leaf enters a sum gate
///   (iii) every output gate is a sum gate
///   (iv)  operator gates alternate: an edge between two non-input gates joins
///         a sum and a product
///   (v)   every product gate has fan-in 2
///   (vi)  every sum gate has fan-out at most 1, and output gates fan-out 0
///
/// Condition (iv) exempts leaves, which (ii) already routes into sums.
enum class NfCondition { leaves_are_inputs = 0, leaf_edges_to_sums, outputs_are_sums, alternating, product_fan_in_two, sum_fan_out_one };

inline constexpr std::size_t kNfConditionCount = 6;

struct ConditionResult {
  bool pass = true;
  /// Gate ids, except for (ii) and (iv) which list edge ids.
  std::vector<std::size_t> offenders;
};

struct NormalFormReport {
  std::array<ConditionResult, kNfConditionCount> conditions;

  bool all_pass() const;
  const ConditionResult& operator[](NfCondition c) const { return conditions[static_cast<std::size_t>(c)]; }
  std::string describe() const;
};

std::string_view condition_name(NfCondition c);

NormalFormReport check_normal_form(const Circuit& c);

/// Size bound promised by normalize: size(result) <= K * size(c) + K.
inline constexpr std::size_t kNormalizeBlowup = 12;

/// Rewrites a homogeneous circuit into normal form computing the same ordered
/// outputs with the same multidegrees. Throws not_homogeneous and
/// degree_zero_output.
///
/// Every sum gate is flattened into a linear combination of "atoms" (leaves
/// and product gates); each consumer then receives its own fresh sum gate over
/// those atoms, which gives fan-out 1 and alternation at once. Products are
/// split into left-leaning binary trees with unary sums between levels.
Circuit normalize(const Circuit& c);

}  // namespace projcx
