#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "projcx/plinear.hpp"
#include "projcx/universal.hpp"

namespace projcx {

/// Level of every gate of a normal-form circuit over one or two blocks.
struct LevelAnnotation {
  struct Entry {
    GateKind role = GateKind::input;
    BiDegree level;
    std::optional<SplitType> type;  // products only
  };
  std::vector<Entry> gates;  // indexed by gate id
};

/// Throws not_normal_form unless c passes every normal-form condition, and
/// bad_parameters for more than two blocks.
LevelAnnotation assign_levels(const Circuit& c);

/// Control values, one per edge of the universal circuit (equivalently one per
/// t-variable of its controlled version).
using ControlAssignment = SparseVector;

struct Embedding {
  ControlAssignment tau;
  /// For each output of c: the designated output of the layout it landed on,
  /// numbered copy * n + slot.
  std::vector<std::uint64_t> output_slot;
  /// Per copy of the layout: (gate of c, gate of the universal circuit).
  std::vector<std::vector<std::pair<GateId, std::uint64_t>>> gate_map;
};

/// Chooses edge weights of the universal circuit so that it computes c. Each
/// output of c goes to the first free designated output of the copy whose top
/// degree equals the output's bidegree; products are placed in order of
/// discovery. Variables of c index the first x/y inputs; the rest are unread.
/// The result is checked at one random point before returning.
///
/// Throws not_normal_form, capacity_exceeded (too many gates of one level and
/// type, too many outputs of one degree, or too many variables) and
/// degree_not_representable.
Embedding embed(const Circuit& c, const UniversalLayout& layout);

struct Reduction {
  std::size_t n1 = 0, n2 = 0;
  std::uint32_t d = 0;   // largest degree of any output in any block
  std::uint64_t size = 0;  // edges of C
  std::uint64_t q = 0;     // max(n1 + n2 + 1, d, size)
  UniversalLayout layout;  // x:q, y:n2, r = q, s = q^2 + q + n2
  Embedding embedding;
  PLinearMap rho;  // x -> ([x, 0, ..., 0], [tau])
};

/// Maps the family member C over blocks (x:n1, y:n2) into the universal
/// circuit resultant: for every x, (exists y: C(x, y) = 0) iff
/// (exists y: Phi'(pad(x), y, tau) = 0).
Reduction build_reduction(const Circuit& c, std::size_t n1, std::size_t n2);

/// Same pipeline into a caller-chosen layout (must have q x-inputs for some
/// q >= n1 and exactly n2 y-inputs).
Reduction build_reduction(const Circuit& c, std::size_t n1, std::size_t n2, UniversalLayout layout);

/// Text form of a control assignment. The header records the layout:
///     tau n 3 m 0 s 4 tops 1,0 N 86 field q
/// followed by N lines of values, or by `format sparse` and `<index> <value>`
/// lines for the nonzero entries only.
std::string serialize_tau(const UniversalLayout& layout, const ControlAssignment& tau, bool sparse);
std::pair<UniversalLayout, ControlAssignment> parse_tau(std::string_view text);

}  // namespace projcx
