#include "projcx/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

namespace projcx {

namespace {

using Terms = std::map<Monomial, FieldElem>;

void add_term(Terms& t, const Monomial& m, const FieldElem& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = t.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) t.erase(it);
  }
}

std::vector<std::size_t> offsets_of(const BlockSpec& blocks) {
  std::vector<std::size_t> off(blocks.count() + 1, 0);
  for (std::size_t b = 0; b < blocks.count(); ++b) off[b + 1] = off[b] + blocks.size_of(b);
  return off;
}

bool is_zero_mod(const DensePoly& poly, Field f) {
  for (const auto& [m, c] : poly.terms) {
    if (!convert(c, f).is_zero()) return false;
  }
  return true;
}

// Zero flags for all outputs by expansion, or nullopt if that is too costly.
std::optional<std::vector<bool>> zeros_by_expansion(const Circuit& c, Field f) {
  constexpr std::size_t kMaxEdges = 256;
  if (c.edge_count() > kMaxEdges) return std::nullopt;
  try {
    std::vector<bool> zero;
    for (const auto& poly : dense_expand(c)) zero.push_back(is_zero_mod(poly, f));
    return zero;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::budget_exceeded) return std::nullopt;
    throw;
  }
}

RawAssignment prefix(const RawAssignment& point, const BlockSpec& blocks) {
  RawAssignment out;
  for (std::size_t b = 0; b < blocks.count(); ++b) {
    out.emplace_back(point[b].begin(), point[b].begin() + static_cast<std::ptrdiff_t>(blocks.size_of(b)));
  }
  return out;
}

}  // namespace

FieldElem DensePoly::evaluate(const Assignment& point) const {
  std::vector<FieldElem> flat;
  for (const auto& block : point) flat.insert(flat.end(), block.begin(), block.end());
  FieldElem acc = FieldElem::zero(field);
  for (const auto& [m, c] : terms) {
    if (m.size() != flat.size()) throw Error(ErrorKind::length_mismatch, "point does not match the polynomial's variables");
    FieldElem t = c;
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::uint32_t k = 0; k < m[i]; ++k) t *= flat[i];
    }
    acc += t;
  }
  return acc;
}

std::vector<DensePoly> dense_expand(const Circuit& c, std::size_t budget) {
  const ValidationReport report = validate(c);
  const auto off = offsets_of(c.blocks());
  const std::size_t vars = off.back();
  std::vector<Terms> poly(c.gate_count());
  for (GateId g : c.topological_order()) {
    const Gate& gate = c.gate(g);
    Terms& out = poly[g];
    if (gate.kind == GateKind::input) {
      Monomial m(vars, 0);
      m[off[gate.block] + gate.index] = 1;
      out.emplace(std::move(m), FieldElem::one(c.field()));
    } else if (gate.kind == GateKind::sum) {
      for (EdgeId e : c.in_edges(g)) {
        for (const auto& [m, coef] : poly[c.edge(e).source]) add_term(out, m, coef * c.edge(e).weight);
      }
    } else {
      out.emplace(Monomial(vars, 0), FieldElem::one(c.field()));
      for (EdgeId e : c.in_edges(g)) {
        Terms next;
        for (const auto& [ma, ca] : out) {
          for (const auto& [mb, cb] : poly[c.edge(e).source]) {
            Monomial m(vars);
            for (std::size_t i = 0; i < vars; ++i) m[i] = ma[i] + mb[i];
            add_term(next, m, ca * cb * c.edge(e).weight);
            if (next.size() > budget) throw Error(ErrorKind::budget_exceeded, "gate " + std::to_string(g) + " expands past " + std::to_string(budget) + " monomials");
          }
        }
        out = std::move(next);
      }
    }
    if (out.size() > budget) throw Error(ErrorKind::budget_exceeded, "gate " + std::to_string(g) + " expands past " + std::to_string(budget) + " monomials");
  }
  std::vector<DensePoly> result;
  for (std::size_t i = 0; i < c.outputs().size(); ++i) {
    result.push_back(DensePoly{c.blocks(), c.field(), report.output_degrees[i], poly[c.outputs()[i]]});
  }
  return result;
}

std::string format_poly(const DensePoly& p) {
  if (p.terms.empty()) return "0";
  std::vector<std::string> names;
  for (const auto& b : p.blocks.blocks()) {
    for (std::size_t i = 0; i < b.size; ++i) names.push_back(b.name + std::to_string(i));
  }
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms) {
    if (!first) s += " + ";
    first = false;
    s += c.to_string();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      s += "*" + names[i];
      if (m[i] > 1) s += "^" + std::to_string(m[i]);
    }
  }
  return s;
}

std::string PitVerdict::to_line() const {
  nlohmann::json j;
  j["status"] = equal ? "equal" : "unequal";
  j["trials"] = trials;
  j["pre_trials"] = pre_trials;
  j["zeros_by_expansion"] = zeros_by_expansion;
  j["p"] = p;
  j["seed"] = seed;
  j["max_degree"] = max_degree;
  j["error_bound"] = error_bound;
  if (witness) {
    j["witness"] = *witness;
    j["witness_outputs"] = {witness_outputs.first, witness_outputs.second};
  } else {
    j["witness"] = nullptr;
  }
  return j.dump();
}

PitVerdict pit_equal(const Circuit& c1, const Circuit& c2, const PitOptions& options) {
  ValidationReport r1 = validate(c1), r2 = validate(c2);
  // a circuit with fewer blocks reads none of the missing ones
  const std::size_t nblocks = std::max(c1.blocks().count(), c2.blocks().count());
  for (auto* r : {&r1, &r2}) {
    for (auto& d : r->output_degrees) d.resize(nblocks, 0);
  }
  std::uint32_t degree = 0;
  for (const auto& d : r1.output_degrees) degree = std::max(degree, total_degree(d));
  for (const auto& d : r2.output_degrees) degree = std::max(degree, total_degree(d));

  std::uint64_t p = options.p;
  if (p == 0) {
    if (c1.field().is_prime() && c1.field() == c2.field()) {
      p = c1.field().modulus();
    } else {
      p = kMersenne31;
    }
  }
  const Field f = Field::prime(p);
  for (const Circuit* c : {&c1, &c2}) {
    if (c->field().is_prime() && c->field().modulus() != p) throw Error(ErrorKind::field_mismatch, "circuit over " + c->field().describe() + " tested in gf " + std::to_string(p));
  }
  if (p <= degree) throw Error(ErrorKind::field_too_small, "p = " + std::to_string(p) + " does not exceed the degree " + std::to_string(degree));

  PitVerdict v;
  v.p = p;
  v.seed = options.seed;
  v.max_degree = degree;
  const ModEvaluator e1(c1, p), e2(c2, p);
  std::vector<std::size_t> sizes(nblocks, 0);
  for (const Circuit* c : {&c1, &c2}) {
    for (std::size_t b = 0; b < c->blocks().count(); ++b) sizes[b] = std::max(sizes[b], c->blocks().size_of(b));
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  auto random_point = [&] {
    RawAssignment pt(sizes.size());
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      pt[b].resize(sizes[b]);
      for (auto& x : pt[b]) x = dist(rng);
    }
    return pt;
  };

  // zero outputs
  std::optional<std::vector<bool>> z1 = zeros_by_expansion(c1, f), z2;
  if (z1) z2 = zeros_by_expansion(c2, f);
  if (z1 && z2) {
    v.zeros_by_expansion = true;
  } else {
    constexpr std::size_t kPreTrials = 8;
    v.pre_trials = kPreTrials;
    z1 = std::vector<bool>(c1.outputs().size(), true);
    z2 = std::vector<bool>(c2.outputs().size(), true);
    for (std::size_t t = 0; t < kPreTrials; ++t) {
      const RawAssignment pt = random_point();
      const auto a = e1.evaluate(prefix(pt, c1.blocks()));
      const auto b = e2.evaluate(prefix(pt, c2.blocks()));
      for (std::size_t i = 0; i < a.size(); ++i) (*z1)[i] = (*z1)[i] && a[i] == 0;
      for (std::size_t i = 0; i < b.size(); ++i) (*z2)[i] = (*z2)[i] && b[i] == 0;
    }
  }

  // pair the nonzero outputs by degree, then by order
  std::vector<std::size_t> l1, l2;
  for (std::size_t i = 0; i < z1->size(); ++i) {
    if (!(*z1)[i]) l1.push_back(i);
  }
  for (std::size_t i = 0; i < z2->size(); ++i) {
    if (!(*z2)[i]) l2.push_back(i);
  }
  std::stable_sort(l1.begin(), l1.end(), [&](std::size_t a, std::size_t b) { return r1.output_degrees[a] < r1.output_degrees[b]; });
  std::stable_sort(l2.begin(), l2.end(), [&](std::size_t a, std::size_t b) { return r2.output_degrees[a] < r2.output_degrees[b]; });
  bool structurally_unequal = false;
  for (std::size_t i = 0, j = 0; i < l1.size() || j < l2.size();) {
    if (j == l2.size() || (i < l1.size() && r1.output_degrees[l1[i]] < r2.output_degrees[l2[j]])) {
      v.matching.emplace_back(static_cast<long>(l1[i++]), -1);
      structurally_unequal = true;
    } else if (i == l1.size() || r2.output_degrees[l2[j]] < r1.output_degrees[l1[i]]) {
      v.matching.emplace_back(-1, static_cast<long>(l2[j++]));
      structurally_unequal = true;
    } else {
      v.matching.emplace_back(static_cast<long>(l1[i++]), static_cast<long>(l2[j++]));
    }
  }

  // unequal pairs are found within a few points; keep looking past the
  // nominal trial count only when the pairing already proves inequality
  constexpr std::size_t kExtraSearch = 1000;
  const std::size_t limit = options.trials + (structurally_unequal ? kExtraSearch : 0);
  for (std::size_t t = 0; t < limit; ++t) {
    const RawAssignment pt = random_point();
    const auto a = e1.evaluate(prefix(pt, c1.blocks()));
    const auto b = e2.evaluate(prefix(pt, c2.blocks()));
    v.trials = std::min(t + 1, options.trials);
    for (const auto& [i, j] : v.matching) {
      const std::uint64_t va = i < 0 ? 0 : a[static_cast<std::size_t>(i)];
      const std::uint64_t vb = j < 0 ? 0 : b[static_cast<std::size_t>(j)];
      if (va != vb) {
        v.equal = false;
        v.witness = pt;
        v.witness_outputs = {i, j};
        v.trials = t + 1;
        return v;
      }
    }
  }
  if (structurally_unequal) {
    // nonzero outputs without a partner that never showed up as nonzero
    v.equal = false;
    return v;
  }
  const double ratio = static_cast<double>(degree) / static_cast<double>(p);
  v.error_bound = std::pow(ratio, static_cast<double>(v.trials)) + (v.pre_trials ? std::pow(ratio, static_cast<double>(v.pre_trials)) : 0.0);
  return v;
}

bool recheck_witness(const Circuit& c1, const Circuit& c2, const PitVerdict& v) {
  if (!v.witness) return false;
  const Field f = Field::prime(v.p);
  auto values = [&](const Circuit& c) {
    const Circuit cf = convert_field(c, f);
    Assignment pt;
    for (std::size_t b = 0; b < c.blocks().count(); ++b) {
      pt.emplace_back();
      for (std::size_t i = 0; i < c.blocks().size_of(b); ++i) pt.back().emplace_back(f, static_cast<std::int64_t>((*v.witness)[b][i]));
    }
    return evaluate(cf, pt);
  };
  const auto a = values(c1), b = values(c2);
  const auto [i, j] = v.witness_outputs;
  const FieldElem va = i < 0 ? FieldElem::zero(f) : a.at(static_cast<std::size_t>(i));
  const FieldElem vb = j < 0 ? FieldElem::zero(f) : b.at(static_cast<std::size_t>(j));
  return !(va == vb);
}

}  // namespace projcx
