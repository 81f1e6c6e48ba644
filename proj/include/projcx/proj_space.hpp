#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "projcx/circuit.hpp"
#include "projcx/plinear.hpp"

namespace projcx {

inline constexpr std::uint64_t kDefaultPointBudget = std::uint64_t{1} << 24;

/// A point of P^{a1} x ... x P^{ak} over GF(q), one coordinate vector per
/// component, each scaled so that its first nonzero coordinate is 1.
struct ProjPoint {
  std::vector<std::vector<std::uint64_t>> coords;

  friend auto operator<=>(const ProjPoint&, const ProjPoint&) = default;
};

/// Scales v so its first nonzero entry is 1; false when v is zero.
bool canonicalize(std::vector<std::uint64_t>& v, std::uint64_t q);

/// Projective dimensions a_i of the components, and the prime q.
struct Ambient {
  std::vector<std::size_t> dims;
  std::uint64_t q = 2;

  friend bool operator==(const Ambient&, const Ambient&) = default;
};

/// Number of rational points, saturating at UINT64_MAX.
std::uint64_t point_count(const Ambient& a);

/// Ambient of a circuit's blocks: a block of size k is P^{k-1}.
Ambient ambient_of(const BlockSpec& blocks, std::uint64_t q);

/// Calls fn on every canonical point in sorted order until it returns false.
/// Throws budget_exceeded when the ambient has more than `budget` points.
void for_each_point(const Ambient& a, const std::function<bool(const ProjPoint&)>& fn, std::uint64_t budget = kDefaultPointBudget);

/// The index-th point in sorted order.
ProjPoint point_at(const Ambient& a, std::uint64_t index);

class PointSet {
public:
  explicit PointSet(Ambient ambient) : ambient_(std::move(ambient)) {}
  /// Sorts and deduplicates.
  PointSet(Ambient ambient, std::vector<ProjPoint> points);

  const Ambient& ambient() const noexcept { return ambient_; }
  const std::vector<ProjPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  bool contains(const ProjPoint& p) const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

private:
  Ambient ambient_;
  std::vector<ProjPoint> points_;
};

/// `[1:0]x[0:1]`
std::string format_point(const ProjPoint& p);
ProjPoint parse_point(std::string_view text, std::uint64_t q);

/// Header `ambient 1,1 field 2`, then one point per line.
std::string serialize_point_set(const PointSet& s);
PointSet parse_point_set(std::string_view text);

PointSet enumerate(const Ambient& a, std::uint64_t budget = kDefaultPointBudget);

/// Common zeros of all outputs over GF(q), one component per block. Rational
/// weights are reduced mod q. The point range is split across `threads`
/// workers; the result does not depend on the thread count.
PointSet zero_set(const Circuit& c, std::uint64_t q, std::uint64_t budget = kDefaultPointBudget, unsigned threads = 1);

/// Image under the projection onto the listed components, in that order.
PointSet project(const PointSet& s, const std::vector<std::size_t>& keep);

/// (x, t) -> [x_i t_j] in row-major order.
ProjPoint segre(const ProjPoint& p, std::uint64_t q);

/// One target component of m at p (canonical), or nullopt when it is zero.
std::optional<std::vector<std::uint64_t>> apply_component(const PLinearMap& m, std::size_t component, const ProjPoint& p, std::uint64_t q);

/// m(p), or nullopt when some component maps to the zero vector.
std::optional<ProjPoint> apply_plinear(const PLinearMap& m, const ProjPoint& p, std::uint64_t q);

/// Points of the source ambient where m is defined and `member` holds on the
/// image.
PointSet pullback(const PLinearMap& m, const std::function<bool(const ProjPoint&)>& member, std::uint64_t q,
                  std::uint64_t budget = kDefaultPointBudget);

/// Whether some canonical point of block `search_block` makes every output
/// vanish, the other blocks fixed to `fixed` (the search block's entry is
/// ignored). An empty search block is no search at all: the answer is whether
/// the outputs vanish at `fixed`. Throws budget_exceeded on the search block.
bool exists_witness(const Circuit& c, const RawAssignment& fixed, std::size_t search_block, std::uint64_t q,
                    std::uint64_t budget = kDefaultPointBudget);
bool exists_witness(const ModEvaluator& eval, RawAssignment point, std::size_t search_block, std::size_t block_size,
                    std::uint64_t budget = kDefaultPointBudget);

/// Same, returning the first witness found.
std::optional<std::vector<std::uint64_t>> find_witness(const ModEvaluator& eval, RawAssignment point, std::size_t search_block, std::size_t block_size,
                                                       std::uint64_t budget = kDefaultPointBudget);

}  // namespace projcx
