#include "projcx/circuit.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

namespace projcx {

BlockSpec::BlockSpec(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw Error(ErrorKind::bad_parameters, "a circuit needs at least one variable block");
  std::set<std::string> seen;
  for (const auto& b : blocks_) {
    if (b.name.empty()) throw Error(ErrorKind::bad_parameters, "empty block name");
    if (!seen.insert(b.name).second) throw Error(ErrorKind::bad_parameters, "duplicate block name '" + b.name + "'");
  }
}

std::optional<std::size_t> BlockSpec::find(std::string_view name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> BlockSpec::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.push_back(b.size);
  return out;
}

std::string BlockSpec::describe() const {
  std::string out;
  for (const auto& b : blocks_) {
    if (!out.empty()) out += ' ';
    out += b.name + ':' + std::to_string(b.size);
  }
  return out;
}

std::uint32_t total_degree(const MultiDegree& d) {
  std::uint32_t t = 0;
  for (auto v : d) t += v;
  return t;
}

std::string to_string(const MultiDegree& d) {
  std::string out = "(";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(d[i]);
  }
  return out + ")";
}

std::span<const EdgeId> Circuit::in_edges(GateId g) const {
  return {in_list_.data() + in_offsets_.at(g), in_offsets_.at(g + 1) - in_offsets_[g]};
}

std::span<const EdgeId> Circuit::out_edges(GateId g) const {
  return {out_list_.data() + out_offsets_.at(g), out_offsets_.at(g + 1) - out_offsets_[g]};
}

bool Circuit::is_output(GateId g) const { return output_flag_.at(g); }

void Circuit::index() {
  const std::size_t n = gates_.size();
  in_offsets_.assign(n + 1, 0);
  out_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++in_offsets_[e.target + 1];
    ++out_offsets_[e.source + 1];
  }
  for (std::size_t g = 0; g < n; ++g) {
    in_offsets_[g + 1] += in_offsets_[g];
    out_offsets_[g + 1] += out_offsets_[g];
  }
  in_list_.assign(edges_.size(), 0);
  out_list_.assign(edges_.size(), 0);
  std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    in_list_[in_fill[edges_[e].target]++] = e;
    out_list_[out_fill[edges_[e].source]++] = e;
  }

  std::vector<std::size_t> pending(n);
  std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
  for (GateId g = 0; g < n; ++g) {
    pending[g] = in_offsets_[g + 1] - in_offsets_[g];
    if (pending[g] == 0) ready.push(g);
  }
  topo_.clear();
  topo_.reserve(n);
  while (!ready.empty()) {
    const GateId g = ready.top();
    ready.pop();
    topo_.push_back(g);
    for (EdgeId e : out_edges(g)) {
      if (--pending[edges_[e].target] == 0) ready.push(edges_[e].target);
    }
  }
  if (topo_.size() != n) {
    for (GateId g = 0; g < n; ++g) {
      if (pending[g] != 0) throw Error(ErrorKind::cycle_detected, "gate " + std::to_string(g) + " lies on a directed cycle");
    }
  }

  output_flag_.assign(n, false);
  for (GateId g : outputs_) output_flag_[g] = true;
}

Circuit Circuit::with_weights(std::span<const FieldElem> weights) const {
  if (weights.size() != edges_.size()) {
    throw Error(ErrorKind::length_mismatch, "expected " + std::to_string(edges_.size()) + " weights, got " + std::to_string(weights.size()));
  }
  Circuit out = *this;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (!(weights[e].field() == field_)) throw Error(ErrorKind::field_mismatch, "weight for edge " + std::to_string(e));
    out.edges_[e].weight = weights[e];
  }
  return out;
}

CircuitBuilder::CircuitBuilder(BlockSpec blocks, Field field) {
  circuit_.blocks_ = std::move(blocks);
  circuit_.field_ = field;
  leaves_.resize(circuit_.blocks_.count());
  for (std::size_t b = 0; b < leaves_.size(); ++b) leaves_[b].resize(circuit_.blocks_.size_of(b));
}

GateId CircuitBuilder::add_input(std::size_t block, std::size_t index) {
  if (block >= circuit_.blocks_.count() || index >= circuit_.blocks_.size_of(block)) {
    throw Error(ErrorKind::shape_mismatch, "input (" + std::to_string(block) + "," + std::to_string(index) + ") outside the block spec");
  }
  const GateId g = circuit_.gates_.size();
  circuit_.gates_.push_back(Gate{GateKind::input, block, index});
  if (!leaves_[block][index]) leaves_[block][index] = g;
  return g;
}

GateId CircuitBuilder::leaf(std::size_t block, std::size_t index) {
  if (block < leaves_.size() && index < leaves_[block].size() && leaves_[block][index]) return *leaves_[block][index];
  return add_input(block, index);
}

GateId CircuitBuilder::add_gate(GateKind kind) {
  if (kind == GateKind::input) throw Error(ErrorKind::malformed_gate, "use add_input for input gates");
  circuit_.gates_.push_back(Gate{kind, 0, 0});
  return circuit_.gates_.size() - 1;
}

GateId CircuitBuilder::add_sum() { return add_gate(GateKind::sum); }
GateId CircuitBuilder::add_product() { return add_gate(GateKind::product); }

EdgeId CircuitBuilder::add_edge(GateId source, GateId target, FieldElem weight) {
  const std::size_t n = circuit_.gates_.size();
  if (source >= n || target >= n) throw Error(ErrorKind::unknown_gate_ref, "edge endpoint out of range");
  if (circuit_.gates_[target].kind == GateKind::input) {
    throw Error(ErrorKind::malformed_gate, "input gate " + std::to_string(target) + " cannot have in-edges");
  }
  if (!(weight.field() == circuit_.field_)) throw Error(ErrorKind::field_mismatch, "edge weight from another field");
  circuit_.edges_.push_back(Edge{source, target, std::move(weight)});
  return circuit_.edges_.size() - 1;
}

EdgeId CircuitBuilder::add_edge(GateId source, GateId target, std::int64_t weight) {
  return add_edge(source, target, FieldElem(circuit_.field_, weight));
}

void CircuitBuilder::add_output(GateId g) {
  if (g >= circuit_.gates_.size()) throw Error(ErrorKind::dangling_output, "output gate " + std::to_string(g) + " does not exist");
  circuit_.outputs_.push_back(g);
}

Circuit CircuitBuilder::build() && {
  circuit_.index();
  for (GateId g = 0; g < circuit_.gates_.size(); ++g) {
    if (circuit_.gates_[g].kind != GateKind::input && circuit_.fan_in(g) == 0) {
      throw Error(ErrorKind::malformed_gate, "operator gate " + std::to_string(g) + " has no inputs");
    }
  }
  return std::move(circuit_);
}

ValidationReport validate(const Circuit& c) {
  for (GateId g : c.outputs()) {
    if (g >= c.gate_count()) throw Error(ErrorKind::dangling_output, "output " + std::to_string(g));
  }
  ValidationReport report;
  report.size = c.edge_count();
  const std::size_t k = c.blocks().count();
  report.degrees.assign(c.gate_count(), MultiDegree(k, 0));
  for (GateId g : c.topological_order()) {
    const Gate& gate = c.gate(g);
    MultiDegree& d = report.degrees[g];
    switch (gate.kind) {
      case GateKind::input:
        d[gate.block] = 1;
        break;
      case GateKind::product:
        for (EdgeId e : c.in_edges(g)) {
          const MultiDegree& child = report.degrees[c.edge(e).source];
          for (std::size_t b = 0; b < k; ++b) d[b] += child[b];
        }
        break;
      case GateKind::sum: {
        auto in = c.in_edges(g);
        d = report.degrees[c.edge(in.front()).source];
        for (EdgeId e : in) {
          const MultiDegree& child = report.degrees[c.edge(e).source];
          if (child != d) {
            throw Error(ErrorKind::inhomogeneous_sum, "gate " + std::to_string(g) + " mixes degrees " + to_string(d) + " and " + to_string(child));
          }
        }
        break;
      }
    }
  }
  for (GateId g : c.outputs()) report.output_degrees.push_back(report.degrees[g]);
  return report;
}

namespace {

void check_shape(const Circuit& c, std::size_t blocks, auto&& size_of) {
  if (blocks != c.blocks().count()) {
    throw Error(ErrorKind::length_mismatch, "assignment has " + std::to_string(blocks) + " blocks, circuit has " + std::to_string(c.blocks().count()));
  }
  for (std::size_t b = 0; b < blocks; ++b) {
    if (size_of(b) != c.blocks().size_of(b)) {
      throw Error(ErrorKind::length_mismatch, "block '" + c.blocks()[b].name + "' expects " + std::to_string(c.blocks().size_of(b)) + " values");
    }
  }
}

}  // namespace

std::vector<FieldElem> evaluate(const Circuit& c, const Assignment& point) {
  check_shape(c, point.size(), [&](std::size_t b) { return point[b].size(); });
  for (const auto& block : point) {
    for (const auto& v : block) {
      if (!(v.field() == c.field())) throw Error(ErrorKind::field_mismatch, "assignment value over " + v.field().describe());
    }
  }
  const Field f = c.field();
  if (f.is_prime()) {
    RawAssignment raw(point.size());
    for (std::size_t b = 0; b < point.size(); ++b) {
      for (const auto& v : point[b]) raw[b].push_back(v.residue());
    }
    std::vector<FieldElem> out;
    for (auto v : ModEvaluator(c, f.modulus()).evaluate(raw)) out.emplace_back(f, static_cast<std::int64_t>(v));
    return out;
  }
  std::vector<FieldElem> values(c.gate_count(), FieldElem::zero(f));
  for (GateId g : c.topological_order()) {
    const Gate& gate = c.gate(g);
    if (gate.kind == GateKind::input) {
      values[g] = point[gate.block][gate.index];
      continue;
    }
    FieldElem acc = gate.kind == GateKind::sum ? FieldElem::zero(f) : FieldElem::one(f);
    for (EdgeId e : c.in_edges(g)) {
      const Edge& edge = c.edge(e);
      FieldElem term = edge.weight * values[edge.source];
      if (gate.kind == GateKind::sum) {
        acc += term;
      } else {
        acc *= term;
      }
    }
    values[g] = std::move(acc);
  }
  std::vector<FieldElem> out;
  out.reserve(c.outputs().size());
  for (GateId g : c.outputs()) out.push_back(values[g]);
  return out;
}

ModEvaluator::ModEvaluator(const Circuit& c, std::uint64_t p) : p_(p), block_sizes_(c.blocks().sizes()) {
  const Field target = Field::prime(p);
  const auto& order = c.topological_order();
  std::vector<std::size_t> position(c.gate_count());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
  kind_.reserve(order.size());
  block_.reserve(order.size());
  index_.reserve(order.size());
  in_begin_.reserve(order.size() + 1);
  src_.reserve(c.edge_count());
  weight_.reserve(c.edge_count());
  for (GateId g : order) {
    const Gate& gate = c.gate(g);
    kind_.push_back(gate.kind);
    block_.push_back(gate.block);
    index_.push_back(gate.index);
    in_begin_.push_back(src_.size());
    for (EdgeId e : c.in_edges(g)) {
      src_.push_back(position[c.edge(e).source]);
      weight_.push_back(convert(c.edge(e).weight, target).residue());
    }
  }
  in_begin_.push_back(src_.size());
  for (GateId g : c.outputs()) outputs_.push_back(position[g]);
}

void ModEvaluator::run(const RawAssignment& point, std::vector<std::uint64_t>& values) const {
  if (point.size() != block_sizes_.size()) throw Error(ErrorKind::length_mismatch, "wrong number of blocks in assignment");
  for (std::size_t b = 0; b < point.size(); ++b) {
    if (point[b].size() != block_sizes_[b]) throw Error(ErrorKind::length_mismatch, "wrong block length in assignment");
  }
  values.resize(kind_.size());
  for (std::size_t i = 0; i < kind_.size(); ++i) {
    switch (kind_[i]) {
      case GateKind::input:
        values[i] = point[block_[i]][index_[i]] % p_;
        break;
      case GateKind::sum: {
        std::uint64_t acc = 0;
        for (std::size_t k = in_begin_[i]; k < in_begin_[i + 1]; ++k) {
          acc = add_mod(acc, mul_mod(weight_[k], values[src_[k]], p_), p_);
        }
        values[i] = acc;
        break;
      }
      case GateKind::product: {
        std::uint64_t acc = 1 % p_;
        for (std::size_t k = in_begin_[i]; k < in_begin_[i + 1]; ++k) {
          acc = mul_mod(acc, mul_mod(weight_[k], values[src_[k]], p_), p_);
        }
        values[i] = acc;
        break;
      }
    }
  }
}

void ModEvaluator::evaluate(const RawAssignment& point, std::vector<std::uint64_t>& out) const {
  thread_local std::vector<std::uint64_t> values;
  run(point, values);
  out.resize(outputs_.size());
  for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = values[outputs_[i]];
}

std::vector<std::uint64_t> ModEvaluator::evaluate(const RawAssignment& point) const {
  std::vector<std::uint64_t> out;
  evaluate(point, out);
  return out;
}

bool ModEvaluator::all_outputs_vanish(const RawAssignment& point) const {
  thread_local std::vector<std::uint64_t> values;
  run(point, values);
  for (auto pos : outputs_) {
    if (values[pos] != 0) return false;
  }
  return true;
}

Circuit prune_dead(const Circuit& c) {
  std::vector<std::optional<GateId>> map;
  return prune_dead(c, map);
}

Circuit prune_dead(const Circuit& c, std::vector<std::optional<GateId>>& gate_map) {
  std::vector<bool> live(c.gate_count(), false);
  std::vector<GateId> stack(c.outputs().begin(), c.outputs().end());
  while (!stack.empty()) {
    const GateId g = stack.back();
    stack.pop_back();
    if (live[g]) continue;
    live[g] = true;
    for (EdgeId e : c.in_edges(g)) stack.push_back(c.edge(e).source);
  }
  CircuitBuilder b(c.blocks(), c.field());
  gate_map.assign(c.gate_count(), std::nullopt);
  for (GateId g = 0; g < c.gate_count(); ++g) {
    if (!live[g]) continue;
    const Gate& gate = c.gate(g);
    gate_map[g] = gate.kind == GateKind::input ? b.add_input(gate.block, gate.index) : b.add_gate(gate.kind);
  }
  for (const Edge& e : c.edges()) {
    if (live[e.target]) b.add_edge(*gate_map[e.source], *gate_map[e.target], e.weight);
  }
  for (GateId g : c.outputs()) b.add_output(*gate_map[g]);
  return std::move(b).build();
}

Circuit convert_field(const Circuit& c, Field target) {
  if (c.field() == target) return c;
  CircuitBuilder b(c.blocks(), target);
  for (const Gate& gate : c.gates()) {
    if (gate.kind == GateKind::input) {
      b.add_input(gate.block, gate.index);
    } else {
      b.add_gate(gate.kind);
    }
  }
  for (const Edge& e : c.edges()) b.add_edge(e.source, e.target, convert(e.weight, target));
  for (GateId g : c.outputs()) b.add_output(g);
  return std::move(b).build();
}

}  // namespace projcx
