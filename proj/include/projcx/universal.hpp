#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "projcx/circuit.hpp"
#include "projcx/sparse_vector.hpp"

namespace projcx {

/// Degree in the two input blocks (x, y); also the index of a level.
struct BiDegree {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  std::uint32_t total() const noexcept { return x + y; }
  bool is_zero() const noexcept { return x == 0 && y == 0; }
  bool fits_in(BiDegree top) const noexcept { return x <= top.x && y <= top.y; }
  friend BiDegree operator-(BiDegree a, BiDegree b) { return {a.x - b.x, a.y - b.y}; }
  friend BiDegree operator+(BiDegree a, BiDegree b) { return {a.x + b.x, a.y + b.y}; }
  friend auto operator<=>(const BiDegree&, const BiDegree&) = default;
};

std::string to_string(BiDegree d);

/// Unordered split {left, right} of a product level; left <= right.
struct SplitType {
  BiDegree left;
  BiDegree right;
  friend auto operator<=>(const SplitType&, const SplitType&) = default;
};

enum class GateRole { x_input, y_input, product, sum };

struct GateInfo {
  GateRole role;
  std::size_t copy = 0;       // degree-pair copy (operators only)
  BiDegree level;             // operators only
  std::size_t type = 0;       // products only: index into level types
  std::uint64_t index = 0;    // position within its level (and type) or input index
};

struct EdgeInfo {
  std::uint64_t source;
  std::uint64_t target;
};

/// Closed-form description of a universal circuit: the union of one copy per
/// top degree pair, sharing the n x-inputs and m y-inputs.
///
/// Inside a copy with top degree R, the levels are all L <= R except (0,0),
/// ordered by total degree. Sum-level L holds `sum_multiplier * s` sum gates;
/// product-level L (for total(L) >= 2) holds s product gates for every
/// unordered split of L into two nonzero parts. Each sum gate at L reads every
/// product gate at L, or every input of the matching block at (1,0)/(0,1).
/// Each product gate reads two sum gates of its split levels, allocated
/// injectively in construction order. The first n sum gates of the top level
/// are the designated outputs.
///
/// Ids are assigned level by level (products, then sums) after the inputs, so
/// every gate and edge id is a formula of the parameters. materialize()
/// produces the explicit circuit with exactly those ids.
class UniversalLayout {
public:
  struct Level {
    BiDegree degree;
    std::vector<SplitType> types;
    std::vector<std::size_t> child_level[2];     // per type: level index of left/right part
    std::vector<std::uint64_t> alloc_start[2];  // per type: first sum index consumed
    std::uint64_t product_base = 0;
    std::uint64_t sum_base = 0;
    std::uint64_t sum_count = 0;
    std::uint64_t sum_fan_in = 0;
    std::uint64_t edge_base = 0;      // product in-edges start here
    std::uint64_t sum_edge_base = 0;  // sum in-edges start here
    std::uint64_t consumed = 0;       // sum gates taken by higher products
    bool unit() const noexcept { return degree.total() == 1; }
    std::uint64_t product_count(std::uint64_t s) const { return types.size() * s; }
  };

  struct Copy {
    BiDegree top;
    std::uint64_t sum_multiplier = 0;
    std::vector<Level> levels;
    std::size_t level_index(BiDegree d) const;
  };

  /// Throws bad_parameters when some copy cannot be wired (n = 0, s < n,
  /// a zero top degree, or y-degree without y-inputs).
  UniversalLayout(std::size_t n, std::size_t m, std::uint64_t s, std::vector<BiDegree> tops);

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::uint64_t s() const noexcept { return s_; }
  const std::vector<Copy>& copies() const noexcept { return copies_; }
  std::vector<BiDegree> tops() const;

  std::uint64_t gate_count() const noexcept { return gate_count_; }
  std::uint64_t edge_count() const noexcept { return edge_count_; }
  std::uint64_t output_count() const noexcept { return copies_.size() * n_; }

  std::uint64_t x_input(std::size_t i) const { return i; }
  std::uint64_t y_input(std::size_t i) const { return n_ + i; }
  std::uint64_t sum_gate(std::size_t copy, std::size_t level, std::uint64_t j) const;
  std::uint64_t product_gate(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k) const;
  /// Designated output `slot` of a copy (slot < n).
  std::uint64_t output_gate(std::size_t copy, std::size_t slot) const;
  /// Sum gate feeding side 0 (left) or 1 (right) of a product gate.
  std::uint64_t allocated_sum(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k, int side) const;

  /// Edge ids by endpoint role.
  std::uint64_t input_edge(std::size_t copy, std::size_t level, std::uint64_t sum_j, std::size_t input_i) const;
  std::uint64_t product_to_sum_edge(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k, std::uint64_t sum_j) const;
  std::uint64_t sum_to_product_edge(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k, int side) const;

  GateInfo gate_info(std::uint64_t gate) const;
  EdgeInfo edge_info(std::uint64_t edge) const;

  /// Explicit circuit over blocks (x:n, y:m) with every weight zero. Throws
  /// resource_limit above `gate_budget` gates or edges.
  Circuit materialize(Field field, std::uint64_t gate_budget = kDefaultGateBudget) const;

  static constexpr std::uint64_t kDefaultGateBudget = std::uint64_t{1} << 24;

private:
  struct LevelRef {
    std::size_t copy;
    std::size_t level;
  };
  const Level& level_at(std::size_t copy, std::size_t level) const { return copies_.at(copy).levels.at(level); }

  std::size_t n_, m_;
  std::uint64_t s_;
  std::vector<Copy> copies_;
  std::vector<LevelRef> flat_;  // all levels in id order
  std::uint64_t gate_count_ = 0;
  std::uint64_t edge_count_ = 0;
};

/// Sum gates per level, in units of s, for a copy with top degree `top`:
/// the larger of max(r1,1)*max(r2,1) and the largest number of sum gates any
/// level hands to higher product gates.
std::uint64_t sum_multiplier(BiDegree top);

/// Single-copy universal circuit for n outputs of bidegree (r1, r2) over n
/// x-inputs and m y-inputs. Requires s >= n + m, n >= 1, (r1,r2) != (0,0).
std::pair<Circuit, UniversalLayout> build_universal(std::size_t n, std::size_t m, std::uint32_t r1, std::uint32_t r2, std::uint64_t s,
                                                    Field field = Field::rationals());

/// All degree pairs (r1, r2) <= (r, r) except (0,0), and only y-degree 0 when
/// m = 0, in lexicographic order.
std::vector<BiDegree> all_degree_pairs(std::uint32_t r, std::size_t m);

/// Layout of the all-degree union. Requires s >= r (n + m).
UniversalLayout universal_alldeg_layout(std::size_t n, std::size_t m, std::uint32_t r, std::uint64_t s);
std::pair<Circuit, UniversalLayout> build_universal_alldeg(std::size_t n, std::size_t m, std::uint32_t r, std::uint64_t s,
                                                           Field field = Field::rationals());

/// Control variables: t-index e belongs to edge e of the universal circuit.
struct ControlTable {
  std::uint64_t n_controls = 0;  // N
  std::uint64_t phi_gates = 0;   // gates of the uncontrolled circuit
  std::uint64_t t_leaf(std::uint64_t e) const { return phi_gates + 2 * e; }
  std::uint64_t control_product(std::uint64_t e) const { return phi_gates + 2 * e + 1; }
  std::uint64_t edge_for_control(std::uint64_t t) const { return t; }
};

/// Splits every edge (u, v) of phi through a product gate multiplied by a new
/// leaf t_e. The result has blocks (x, y, t:N) and all weights 1. Gate ids of
/// phi are kept; t_e and its product follow as t_leaf(e), control_product(e).
std::pair<Circuit, ControlTable> controlize(const Circuit& phi);

/// t-degree of a controlled output at level of total degree d: 4d - 3.
std::uint32_t controlled_t_degree(std::uint32_t total_level_degree);

/// Phi' with its t-block fixed to tau: the structurally nonzero part of the
/// controlled circuit after folding each t_e = tau_e into its product gate.
/// Only edges with nonzero tau are visited, so this works for layouts far too
/// large to materialize.
struct RestrictedCircuit {
  Circuit circuit;  // blocks (x:n, y:m)
  /// For each designated output of the layout: index into circuit.outputs(),
  /// or nullopt when the output is structurally zero under tau.
  std::vector<std::optional<std::size_t>> output_index;
};
RestrictedCircuit restrict_controls(const UniversalLayout& layout, const SparseVector& tau);

/// Universal-circuit-resultant parameters for R_{n,m}: r = n, s = n^2 + n + m.
struct UcrParams {
  std::size_t n = 0, m = 0;
  std::uint32_t r = 0;
  std::uint64_t s = 0;
  std::uint64_t n_controls = 0;  // N
  std::uint64_t outputs = 0;     // M
  std::uint64_t phi_gates = 0;
  std::uint64_t phi_prime_gates = 0;
  std::uint64_t claimed_outputs = 0;  // n^4, the figure quoted for M
  std::pair<std::uint64_t, std::uint64_t> ambient;  // (n - 1, N - 1)
  bool materialized = false;
};

/// Layout of Phi_{n,m,r,s} used for the resultant family. Unlike
/// universal_alldeg_layout this only needs s >= n + m, since s = n^2 + n + m
/// falls short of r (n + m) once m >= 2.
UniversalLayout ucr_layout(std::size_t n, std::size_t m);

/// Counts N and M. When Phi' fits in `gate_budget` it is actually built by
/// controlize and measured; otherwise resource_limit is thrown unless
/// `allow_formula` is set, in which case the closed-form counts are reported.
UcrParams ucr_params(std::size_t n, std::size_t m, std::uint64_t gate_budget = UniversalLayout::kDefaultGateBudget,
                     bool allow_formula = false);

/// Sidecar text: `gate <id> <role> <level> [<type>]` and `edge <id> t <index>`.
std::string serialize_layout(const UniversalLayout& layout);

/// Gate/edge/N/M counts and degree profiles for `stats`.
std::string describe_layout(const UniversalLayout& layout);

}  // namespace projcx
