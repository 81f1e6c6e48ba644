#include "projcx/plinear.hpp"

#include <optional>
#include <string>

namespace projcx {

PLinearMap::PLinearMap(BlockSpec source, BlockSpec target, Field field, std::vector<MapComponent> components)
    : source_(std::move(source)), target_(std::move(target)), field_(field), components_(std::move(components)) {
  if (components_.size() != target_.count()) {
    throw Error(ErrorKind::shape_mismatch, "map has " + std::to_string(components_.size()) + " components for " + std::to_string(target_.count()) + " target blocks");
  }
  for (std::size_t b = 0; b < components_.size(); ++b) {
    const std::string where = "component " + std::to_string(b);
    if (const auto* lin = std::get_if<LinearPart>(&components_[b])) {
      if (lin->source >= source_.count()) throw Error(ErrorKind::shape_mismatch, where + " reads a missing source component");
      if (lin->matrix.size() != target_.size_of(b)) throw Error(ErrorKind::shape_mismatch, where + ": wrong row count");
      bool nonzero = false;
      for (const auto& row : lin->matrix) {
        if (row.size() != source_.size_of(lin->source)) throw Error(ErrorKind::shape_mismatch, where + ": wrong column count");
        for (const auto& v : row) {
          if (!(v.field() == field_)) throw Error(ErrorKind::field_mismatch, where);
          nonzero = nonzero || !v.is_zero();
        }
      }
      if (!nonzero) throw Error(ErrorKind::bad_parameters, where + " is the zero matrix");
    } else {
      const auto& cst = std::get<ConstantPart>(components_[b]);
      if (cst.point.length() != target_.size_of(b)) throw Error(ErrorKind::shape_mismatch, where + ": constant has wrong length");
      if (!(cst.point.field() == field_)) throw Error(ErrorKind::field_mismatch, where);
      if (cst.point.is_zero()) throw Error(ErrorKind::bad_parameters, where + " is the zero vector");
    }
  }
}

PLinearMap PLinearMap::identity(const BlockSpec& blocks, Field field) {
  std::vector<MapComponent> comps;
  for (std::size_t b = 0; b < blocks.count(); ++b) {
    const std::size_t n = blocks.size_of(b);
    LinearPart lin{b, std::vector<std::vector<FieldElem>>(n, std::vector<FieldElem>(n, FieldElem::zero(field)))};
    for (std::size_t i = 0; i < n; ++i) lin.matrix[i][i] = FieldElem::one(field);
    comps.emplace_back(std::move(lin));
  }
  return PLinearMap(blocks, blocks, field, std::move(comps));
}

namespace {

// Value of a gate after substitution: either a gate of the new circuit or a
// constant that has been folded away.
struct Folded {
  std::optional<GateId> gate;
  FieldElem constant;
};

}  // namespace

Circuit compose_plinear(const Circuit& c, const PLinearMap& m) {
  if (m.target().sizes() != c.blocks().sizes()) {
    throw Error(ErrorKind::shape_mismatch, "map target " + m.target().describe() + " does not match circuit blocks " + c.blocks().describe());
  }
  if (!(m.field() == c.field())) throw Error(ErrorKind::field_mismatch, "map and circuit over different fields");
  const Field f = c.field();
  CircuitBuilder b(m.source(), f);

  // Linear forms are materialized lazily, once per target variable.
  std::vector<std::vector<std::optional<Folded>>> substituted(c.blocks().count());
  for (std::size_t k = 0; k < c.blocks().count(); ++k) substituted[k].resize(c.blocks().size_of(k));
  auto variable = [&](std::size_t block, std::size_t index) -> Folded {
    auto& slot = substituted[block][index];
    if (slot) return *slot;
    const MapComponent& comp = m.component(block);
    if (const auto* lin = std::get_if<LinearPart>(&comp)) {
      const auto& row = lin->matrix[index];
      const GateId s = b.add_sum();
      bool any = false;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j].is_zero()) continue;
        b.add_edge(b.leaf(lin->source, j), s, row[j]);
        any = true;
      }
      // a zero row still needs an in-edge to keep its degree
      if (!any) b.add_edge(b.leaf(lin->source, 0), s, FieldElem::zero(f));
      slot = Folded{s, FieldElem::zero(f)};
    } else {
      slot = Folded{std::nullopt, std::get<ConstantPart>(comp).point[index]};
    }
    return *slot;
  };

  std::vector<std::optional<Folded>> value(c.gate_count());
  for (GateId g : c.topological_order()) {
    const Gate& gate = c.gate(g);
    if (gate.kind == GateKind::input) {
      value[g] = variable(gate.block, gate.index);
      continue;
    }
    const auto in = c.in_edges(g);
    std::size_t constants = 0;
    for (EdgeId e : in) constants += !value[c.edge(e).source]->gate;
    if (gate.kind == GateKind::sum) {
      if (constants == in.size()) {
        FieldElem acc = FieldElem::zero(f);
        for (EdgeId e : in) acc += c.edge(e).weight * value[c.edge(e).source]->constant;
        value[g] = Folded{std::nullopt, acc};
      } else if (constants > 0) {
        throw Error(ErrorKind::not_homogeneous, "sum gate " + std::to_string(g) + " mixes constant and variable terms after substitution");
      } else {
        const GateId s = b.add_sum();
        for (EdgeId e : in) b.add_edge(*value[c.edge(e).source]->gate, s, c.edge(e).weight);
        value[g] = Folded{s, FieldElem::zero(f)};
      }
    } else {
      FieldElem factor = FieldElem::one(f);
      for (EdgeId e : in) {
        if (!value[c.edge(e).source]->gate) factor *= c.edge(e).weight * value[c.edge(e).source]->constant;
      }
      if (constants == in.size()) {
        value[g] = Folded{std::nullopt, factor};
      } else {
        const GateId p = b.add_product();
        bool first = true;
        for (EdgeId e : in) {
          const Folded& child = *value[c.edge(e).source];
          if (!child.gate) continue;
          b.add_edge(*child.gate, p, first ? factor * c.edge(e).weight : c.edge(e).weight);
          first = false;
        }
        value[g] = Folded{p, FieldElem::zero(f)};
      }
    }
  }
  for (GateId g : c.outputs()) {
    if (!value[g]->gate) throw Error(ErrorKind::degree_zero_output, "output gate " + std::to_string(g) + " folds to a constant");
    b.add_output(*value[g]->gate);
  }
  return std::move(b).build();
}

}  // namespace projcx
