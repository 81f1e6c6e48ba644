#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "projcx/field.hpp"

namespace projcx {

using GateId = std::size_t;
using EdgeId = std::size_t;

struct Block {
  std::string name;
  std::size_t size = 0;

  friend bool operator==(const Block&, const Block&) = default;
};

/// Ordered variable blocks, e.g. x:n, y:m, t:N.
class BlockSpec {
public:
  BlockSpec() = default;
  /// Throws bad_parameters on duplicate names or an empty list.
  explicit BlockSpec(std::vector<Block> blocks);

  std::size_t count() const noexcept { return blocks_.size(); }
  const Block& operator[](std::size_t i) const { return blocks_.at(i); }
  std::size_t size_of(std::size_t i) const { return blocks_.at(i).size; }
  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  std::vector<std::size_t> sizes() const;

  /// `x:3 y:2`
  std::string describe() const;

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;

private:
  std::vector<Block> blocks_;
};

/// One degree per block.
using MultiDegree = std::vector<std::uint32_t>;

std::uint32_t total_degree(const MultiDegree& d);
std::string to_string(const MultiDegree& d);

enum class GateKind { input, sum, product };

struct Gate {
  GateKind kind = GateKind::sum;
  std::size_t block = 0;  // input gates only
  std::size_t index = 0;  // input gates only
};

struct Edge {
  GateId source;
  GateId target;
  FieldElem weight;
};

class CircuitBuilder;

/// Weighted multigraph of input/sum/product gates. Immutable once built; the
/// size of a circuit is its edge count.
class Circuit {
public:
  const BlockSpec& blocks() const noexcept { return blocks_; }
  const Field& field() const noexcept { return field_; }

  std::size_t gate_count() const noexcept { return gates_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t size() const noexcept { return edges_.size(); }

  const Gate& gate(GateId g) const { return gates_.at(g); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// In-edges in insertion order.
  std::span<const EdgeId> in_edges(GateId g) const;
  std::span<const EdgeId> out_edges(GateId g) const;
  std::size_t fan_in(GateId g) const { return in_edges(g).size(); }
  std::size_t fan_out(GateId g) const { return out_edges(g).size(); }

  const std::vector<GateId>& outputs() const noexcept { return outputs_; }
  bool is_output(GateId g) const;

  /// Deterministic topological order (Kahn's algorithm, smallest id first).
  const std::vector<GateId>& topological_order() const noexcept { return topo_; }

  /// Same structure with every edge weight replaced; weights.size() must equal
  /// edge_count().
  Circuit with_weights(std::span<const FieldElem> weights) const;

private:
  friend class CircuitBuilder;
  Circuit() = default;
  void index();

  BlockSpec blocks_;
  Field field_ = Field::rationals();
  std::vector<Gate> gates_;
  std::vector<Edge> edges_;
  std::vector<GateId> outputs_;

  std::vector<std::size_t> in_offsets_, out_offsets_;
  std::vector<EdgeId> in_list_, out_list_;
  std::vector<GateId> topo_;
  std::vector<bool> output_flag_;
};

/// Single-owner construction of a Circuit.
class CircuitBuilder {
public:
  CircuitBuilder(BlockSpec blocks, Field field);

  GateId add_input(std::size_t block, std::size_t index);
  /// Returns the input gate for (block, index), creating it on first use.
  GateId leaf(std::size_t block, std::size_t index);
  GateId add_sum();
  GateId add_product();
  GateId add_gate(GateKind kind);
  EdgeId add_edge(GateId source, GateId target, FieldElem weight);
  EdgeId add_edge(GateId source, GateId target, std::int64_t weight);
  void add_output(GateId g);

  std::size_t gate_count() const noexcept { return circuit_.gates_.size(); }
  std::size_t edge_count() const noexcept { return circuit_.edges_.size(); }
  const Field& field() const noexcept { return circuit_.field_; }
  const BlockSpec& blocks() const noexcept { return circuit_.blocks_; }

  /// Throws cycle_detected, malformed_gate (operator without inputs) or
  /// dangling_output.
  Circuit build() &&;

private:
  Circuit circuit_;
  std::vector<std::vector<std::optional<GateId>>> leaves_;
};

struct ValidationReport {
  std::size_t size = 0;
  std::vector<MultiDegree> degrees;  // indexed by gate id
  std::vector<MultiDegree> output_degrees;
  bool homogeneous = true;
};

/// Bottom-up multidegrees. Throws inhomogeneous_sum naming the first sum gate
/// whose children disagree.
ValidationReport validate(const Circuit& c);

/// Assignment of values to every variable, one vector per block.
using Assignment = std::vector<std::vector<FieldElem>>;
using RawAssignment = std::vector<std::vector<std::uint64_t>>;

/// Values of the outputs at `point`. Throws field_mismatch / length_mismatch.
std::vector<FieldElem> evaluate(const Circuit& c, const Assignment& point);

/// Compiled evaluator over GF(p) working on raw residues. Circuit weights are
/// mapped into GF(p) once (rational weights are reduced mod p).
class ModEvaluator {
public:
  ModEvaluator(const Circuit& c, std::uint64_t p);

  std::uint64_t modulus() const noexcept { return p_; }
  std::size_t output_count() const noexcept { return outputs_.size(); }

  void evaluate(const RawAssignment& point, std::vector<std::uint64_t>& out) const;
  std::vector<std::uint64_t> evaluate(const RawAssignment& point) const;
  /// True iff every output vanishes; stops at the first nonzero output.
  bool all_outputs_vanish(const RawAssignment& point) const;

private:
  void run(const RawAssignment& point, std::vector<std::uint64_t>& values) const;

  std::uint64_t p_;
  std::vector<std::size_t> block_sizes_;
  // gates in topological order, in-edges flattened
  std::vector<GateKind> kind_;
  std::vector<std::size_t> block_, index_;
  std::vector<std::size_t> in_begin_;
  std::vector<std::size_t> src_;  // positions in topological order
  std::vector<std::uint64_t> weight_;
  std::vector<std::size_t> outputs_;  // positions in topological order
};

/// Removes gates with no path to an output. Relative gate and edge order is
/// preserved, so an already-lean circuit is returned unchanged.
Circuit prune_dead(const Circuit& c);
/// As above; gate_map[old id] is the new id (or nullopt when removed).
Circuit prune_dead(const Circuit& c, std::vector<std::optional<GateId>>& gate_map);

/// Re-expresses the circuit over another field (weights converted).
Circuit convert_field(const Circuit& c, Field target);

}  // namespace projcx
