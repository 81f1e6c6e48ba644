#pragma once

#include <variant>
#include <vector>

#include "projcx/circuit.hpp"
#include "projcx/sparse_vector.hpp"

namespace projcx {

/// Target component given by a matrix applied to one source component;
/// matrix[i][j] multiplies source coordinate j into target coordinate i.
struct LinearPart {
  std::size_t source = 0;
  std::vector<std::vector<FieldElem>> matrix;
};

/// Target component sent to a fixed point.
struct ConstantPart {
  SparseVector point;
};

using MapComponent = std::variant<LinearPart, ConstantPart>;

/// A map between products of projective spaces that acts on each target
/// component either linearly through a single source component or as a
/// constant. Components are the blocks of the two BlockSpecs.
class PLinearMap {
public:
  /// Throws shape_mismatch on wrong matrix shapes or source indices and
  /// bad_parameters for an all-zero matrix or constant.
  PLinearMap(BlockSpec source, BlockSpec target, Field field, std::vector<MapComponent> components);

  static PLinearMap identity(const BlockSpec& blocks, Field field);

  const BlockSpec& source() const noexcept { return source_; }
  const BlockSpec& target() const noexcept { return target_; }
  const Field& field() const noexcept { return field_; }
  const std::vector<MapComponent>& components() const noexcept { return components_; }
  const MapComponent& component(std::size_t i) const { return components_.at(i); }

private:
  BlockSpec source_;
  BlockSpec target_;
  Field field_;
  std::vector<MapComponent> components_;
};

/// Substitutes the map into the circuit: every variable of target block b is
/// replaced by its linear form (one new sum gate) or its constant (folded into
/// edge weights). The result lives over the map's source blocks. Throws
/// shape_mismatch when the map's target dimensions differ from c's blocks and
/// degree_zero_output if an output folds to a constant.
Circuit compose_plinear(const Circuit& c, const PLinearMap& m);

}  // namespace projcx
