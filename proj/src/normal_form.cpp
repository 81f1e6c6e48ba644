#include "projcx/normal_form.hpp"

#include <sstream>
#include <unordered_map>

namespace projcx {

std::string_view condition_name(NfCondition c) {
  switch (c) {
    case NfCondition::leaves_are_inputs: return "(i) leaves are input variables";
    case NfCondition::leaf_edges_to_sums: return "(ii) leaf edges enter sum gates";
    case NfCondition::outputs_are_sums: return "(iii) outputs are sum gates";
    case NfCondition::alternating: return "(iv) sum/product alternation";
    case NfCondition::product_fan_in_two: return "(v) product fan-in is 2";
    case NfCondition::sum_fan_out_one: return "(vi) sum fan-out <= 1 (outputs 0)";
  }
  return "?";
}

bool NormalFormReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) return false;
  }
  return true;
}

std::string NormalFormReport::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < kNfConditionCount; ++i) {
    const auto& c = conditions[i];
    os << condition_name(static_cast<NfCondition>(i)) << ": " << (c.pass ? "pass" : "FAIL");
    if (!c.pass) {
      const bool edges = i == 1 || i == 3;
      os << " (" << (edges ? "edges" : "gates");
      for (std::size_t k = 0; k < c.offenders.size() && k < 20; ++k) os << ' ' << c.offenders[k];
      if (c.offenders.size() > 20) os << " ...";
      os << ')';
    }
    os << '\n';
  }
  return os.str();
}

NormalFormReport check_normal_form(const Circuit& c) {
  NormalFormReport r;
  auto fail = [&](NfCondition cond, std::size_t id) {
    auto& res = r.conditions[static_cast<std::size_t>(cond)];
    res.pass = false;
    res.offenders.push_back(id);
  };
  for (GateId g = 0; g < c.gate_count(); ++g) {
    const Gate& gate = c.gate(g);
    if (c.fan_in(g) == 0 && gate.kind != GateKind::input) fail(NfCondition::leaves_are_inputs, g);
    if (gate.kind == GateKind::product && c.fan_in(g) != 2) fail(NfCondition::product_fan_in_two, g);
    if (gate.kind == GateKind::sum) {
      const std::size_t limit = c.is_output(g) ? 0 : 1;
      if (c.fan_out(g) > limit) fail(NfCondition::sum_fan_out_one, g);
    }
  }
  for (GateId g : c.outputs()) {
    if (c.gate(g).kind != GateKind::sum) fail(NfCondition::outputs_are_sums, g);
  }
  for (EdgeId e = 0; e < c.edge_count(); ++e) {
    const Gate& src = c.gate(c.edge(e).source);
    const Gate& dst = c.gate(c.edge(e).target);
    if (src.kind == GateKind::input) {
      if (dst.kind != GateKind::sum) fail(NfCondition::leaf_edges_to_sums, e);
    } else if (src.kind == dst.kind) {
      fail(NfCondition::alternating, e);
    }
  }
  return r;
}

namespace {

// Linear combination of atoms (gates of the new circuit), in first-use order.
class LinComb {
public:
  void add(GateId atom, const FieldElem& coeff) {
    auto [it, inserted] = slot_.try_emplace(atom, terms_.size());
    if (inserted) {
      terms_.emplace_back(atom, coeff);
    } else {
      terms_[it->second].second += coeff;
    }
  }
  const std::vector<std::pair<GateId, FieldElem>>& terms() const { return terms_; }

private:
  std::vector<std::pair<GateId, FieldElem>> terms_;
  std::unordered_map<GateId, std::size_t> slot_;
};

}  // namespace

Circuit normalize(const Circuit& c) {
  ValidationReport report;
  try {
    report = validate(c);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::inhomogeneous_sum) throw Error(ErrorKind::not_homogeneous, e.what());
    throw;
  }
  for (std::size_t i = 0; i < c.outputs().size(); ++i) {
    if (total_degree(report.output_degrees[i]) == 0) {
      throw Error(ErrorKind::degree_zero_output, "output " + std::to_string(i) + " has degree zero");
    }
  }

  const Field f = c.field();
  CircuitBuilder b(c.blocks(), f);
  std::vector<LinComb> lc(c.gate_count());

  // fresh sum gate over `scale * lc`, dropping cancelled atoms
  auto fresh_sum = [&](const LinComb& comb, const FieldElem& scale) {
    const GateId s = b.add_sum();
    bool any = false;
    for (const auto& [atom, coeff] : comb.terms()) {
      FieldElem w = coeff * scale;
      if (w.is_zero()) continue;
      b.add_edge(atom, s, std::move(w));
      any = true;
    }
    if (!any) b.add_edge(comb.terms().front().first, s, FieldElem::zero(f));
    return s;
  };

  for (GateId g : c.topological_order()) {
    const Gate& gate = c.gate(g);
    const auto in = c.in_edges(g);
    if (gate.kind == GateKind::input) {
      lc[g].add(b.add_input(gate.block, gate.index), FieldElem::one(f));
    } else if (gate.kind == GateKind::sum || in.size() == 1) {
      // a unary product is just a scaled copy of its operand
      for (EdgeId e : in) {
        for (const auto& [atom, coeff] : lc[c.edge(e).source].terms()) lc[g].add(atom, coeff * c.edge(e).weight);
      }
    } else {
      GateId acc = b.add_product();
      b.add_edge(fresh_sum(lc[c.edge(in[0]).source], c.edge(in[0]).weight), acc, 1);
      b.add_edge(fresh_sum(lc[c.edge(in[1]).source], c.edge(in[1]).weight), acc, 1);
      for (std::size_t k = 2; k < in.size(); ++k) {
        const GateId pass = b.add_sum();
        b.add_edge(acc, pass, 1);
        const GateId next = b.add_product();
        b.add_edge(pass, next, 1);
        b.add_edge(fresh_sum(lc[c.edge(in[k]).source], c.edge(in[k]).weight), next, 1);
        acc = next;
      }
      lc[g].add(acc, FieldElem::one(f));
    }
  }
  for (GateId g : c.outputs()) b.add_output(fresh_sum(lc[g], FieldElem::one(f)));
  Circuit out = prune_dead(std::move(b).build());
  if (!check_normal_form(out).all_pass()) {
    throw std::logic_error("normalize produced a circuit outside normal form:\n" + check_normal_form(out).describe());
  }
  return out;
}

}  // namespace projcx
