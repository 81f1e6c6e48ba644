#include "projcx/families.hpp"

#include <cmath>
#include <functional>

#include <json.hpp>

namespace projcx {

namespace {

std::vector<std::size_t> dims_of(const BlockSpec& b) {
  std::vector<std::size_t> d;
  for (std::size_t i = 0; i < b.count(); ++i) d.push_back(b.size_of(i) - 1);
  return d;
}

// sum over monomials of coeff_leaf(k) * M_k(x), built into b
GateId universal_sum(CircuitBuilder& b, std::size_t x_block, std::size_t coeff_block, std::size_t coeff_offset, const std::vector<Monomial>& mons) {
  std::vector<GateId> products;
  for (std::size_t k = 0; k < mons.size(); ++k) {
    const GateId p = b.add_product();
    b.add_edge(b.leaf(coeff_block, coeff_offset + k), p, 1);
    for (std::size_t i = 0; i < mons[k].size(); ++i) {
      for (std::uint32_t e = 0; e < mons[k][i]; ++e) b.add_edge(b.leaf(x_block, i), p, 1);
    }
    products.push_back(p);
  }
  const GateId s = b.add_sum();
  for (GateId p : products) b.add_edge(p, s, 1);
  return s;
}

}  // namespace

std::string family_metadata(const FamilyInstance& f) {
  nlohmann::json j;
  j["family"] = f.family;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : f.params) params[k] = v;
  j["params"] = params;
  j["ambient"] = f.ambient;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : f.circuit.blocks().blocks()) blocks.push_back({{"name", b.name}, {"size", b.size}});
  j["blocks"] = blocks;
  j["size"] = f.circuit.size();
  j["outputs"] = f.circuit.outputs().size();
  j["field"] = f.circuit.field().is_prime() ? "gf:" + std::to_string(f.circuit.field().modulus()) : "q";
  j["semantics"] = f.semantics;
  return j.dump();
}

FamilyInstance gen_point_family(std::size_t n, Field field) {
  if (n < 1) throw Error(ErrorKind::bad_parameters, "point family needs n >= 1");
  CircuitBuilder b(BlockSpec({{"x", n + 1}}), field);
  std::vector<GateId> outs;
  for (std::size_t i = 1; i <= n; ++i) {
    const GateId s = b.add_sum();
    b.add_edge(b.leaf(0, i), s, 1);
    outs.push_back(s);
  }
  for (GateId g : outs) b.add_output(g);
  Circuit c = std::move(b).build();
  auto dims = dims_of(c.blocks());
  return FamilyInstance{"point", {{"n", n}}, std::move(c), std::move(dims), "zero set is the single point [1:0:...:0] of P^n"};
}

std::vector<Monomial> monomials(std::size_t vars, std::uint32_t d) {
  std::vector<Monomial> out;
  Monomial m(vars, 0);
  // exponents of x0 descending, recursively: lexicographically largest first
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t left) {
    if (i + 1 == vars) {
      m[i] = left;
      out.push_back(m);
      return;
    }
    for (std::uint32_t e = left + 1; e-- > 0;) {
      m[i] = e;
      rec(i + 1, left - e);
    }
    m[i] = 0;
  };
  if (vars > 0) rec(0, d);
  return out;
}

FamilyInstance gen_universal_poly(std::size_t n, std::uint32_t d, Field field) {
  if (n < 1 || d < 1) throw Error(ErrorKind::bad_parameters, "universal polynomial needs n >= 1 and d >= 1");
  const auto mons = monomials(n + 1, d);
  CircuitBuilder b(BlockSpec({{"x", n + 1}, {"a", mons.size()}}), field);
  b.add_output(universal_sum(b, 0, 1, 0, mons));
  Circuit c = std::move(b).build();
  auto dims = dims_of(c.blocks());
  return FamilyInstance{"unipoly", {{"n", n}, {"d", d}}, std::move(c), std::move(dims),
                        "sum of a_M M(x) over degree-d monomials; zero set in P^n x P^N is the incidence of points and hypersurfaces"};
}

FamilyInstance gen_resultant_incidence(std::uint32_t d, std::size_t n, Field field) {
  if (n < 1 || d < 1) throw Error(ErrorKind::bad_parameters, "resultant family needs n >= 1 and d >= 1");
  const auto mons = monomials(n + 1, d);
  CircuitBuilder b(BlockSpec({{"coeff", mons.size() * (n + 1)}, {"x", n + 1}}), field);
  std::vector<GateId> outs;
  for (std::size_t i = 0; i <= n; ++i) outs.push_back(universal_sum(b, 1, 0, i * mons.size(), mons));
  for (GateId g : outs) b.add_output(g);
  Circuit c = std::move(b).build();
  auto dims = dims_of(c.blocks());
  return FamilyInstance{"resultant", {{"d", d}, {"n", n}}, std::move(c), std::move(dims),
                        "n+1 forms of degree d with coefficients in block coeff; projecting the zero set to coeff gives the resultant locus"};
}

bool ucr_membership(const Circuit& phi_prime, const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& t, std::uint64_t q,
                    std::uint64_t budget) {
  if (phi_prime.blocks().count() != 3) throw Error(ErrorKind::shape_mismatch, "expected blocks (x, y, t), got " + phi_prime.blocks().describe());
  RawAssignment point{x, std::vector<std::uint64_t>(phi_prime.blocks().size_of(1)), t};
  return exists_witness(phi_prime, point, 1, q, budget);
}

UcrOracle::UcrOracle(const UniversalLayout& layout, const ControlAssignment& tau, std::uint64_t q)
    : restricted_(restrict_controls(layout, tau)), eval_(restricted_.circuit, q), m_(layout.m()) {}

bool UcrOracle::member(const std::vector<std::uint64_t>& x, std::uint64_t budget) const {
  if (x.size() != restricted_.circuit.blocks().size_of(0)) throw Error(ErrorKind::length_mismatch, "x has the wrong length");
  return exists_witness(eval_, RawAssignment{x, std::vector<std::uint64_t>(m_)}, 1, m_, budget);
}

bool ucr_membership(const UniversalLayout& layout, const std::vector<std::uint64_t>& x, const ControlAssignment& tau, std::uint64_t q,
                    std::uint64_t budget) {
  return UcrOracle(layout, tau, q).member(x, budget);
}

Circuit segre_minors(std::size_t a, std::size_t b, Field field) {
  if (a < 1 || b < 1) throw Error(ErrorKind::bad_parameters, "segre minors need a, b >= 1");
  const std::size_t cols = b + 1;
  CircuitBuilder cb(BlockSpec({{"z", (a + 1) * cols}}), field);
  auto z = [&](std::size_t i, std::size_t j) { return cb.leaf(0, i * cols + j); };
  std::vector<GateId> outs;
  for (std::size_t i = 0; i <= a; ++i) {
    for (std::size_t k = i + 1; k <= a; ++k) {
      for (std::size_t j = 0; j <= b; ++j) {
        for (std::size_t l = j + 1; l <= b; ++l) {
          const GateId p1 = cb.add_product();
          cb.add_edge(z(i, j), p1, 1);
          cb.add_edge(z(k, l), p1, 1);
          const GateId p2 = cb.add_product();
          cb.add_edge(z(i, l), p2, 1);
          cb.add_edge(z(k, j), p2, 1);
          const GateId s = cb.add_sum();
          cb.add_edge(p1, s, 1);
          cb.add_edge(p2, s, -1);
          outs.push_back(s);
        }
      }
    }
  }
  for (GateId g : outs) cb.add_output(g);
  return std::move(cb).build();
}

Circuit segre_transform(const Circuit& phi) {
  const BlockSpec& blocks = phi.blocks();
  if (blocks.count() != 3) throw Error(ErrorKind::not_t_guarded, "expected blocks (x, y, t), got " + blocks.describe());
  const std::size_t n = blocks.size_of(0), m = blocks.size_of(1), N = blocks.size_of(2);
  enum : std::size_t { X = 0, Y = 1, T = 2 };

  // guarded products: exactly one x-leaf and one t-leaf
  struct Guard {
    std::size_t x, t;
    FieldElem weight;
  };
  std::vector<std::optional<Guard>> guard(phi.gate_count());
  for (GateId g = 0; g < phi.gate_count(); ++g) {
    if (phi.gate(g).kind != GateKind::product || phi.fan_in(g) != 2) continue;
    const auto in = phi.in_edges(g);
    const Edge& e0 = phi.edge(in[0]);
    const Edge& e1 = phi.edge(in[1]);
    const Gate& a = phi.gate(e0.source);
    const Gate& b = phi.gate(e1.source);
    auto is = [](const Gate& gate, std::size_t block) { return gate.kind == GateKind::input && gate.block == block; };
    if (is(a, X) && is(b, T)) guard[g] = Guard{a.index, b.index, e0.weight * e1.weight};
    if (is(a, T) && is(b, X)) guard[g] = Guard{b.index, a.index, e0.weight * e1.weight};
  }
  for (GateId g = 0; g < phi.gate_count(); ++g) {
    const Gate& gate = phi.gate(g);
    if (gate.kind != GateKind::input || gate.block != X) continue;
    for (EdgeId e : phi.out_edges(g)) {
      if (!guard[phi.edge(e).target]) {
        throw Error(ErrorKind::not_t_guarded, "x-leaf " + std::to_string(g) + " feeds gate " + std::to_string(phi.edge(e).target) + " without a t partner");
      }
    }
    if (phi.is_output(g)) throw Error(ErrorKind::not_t_guarded, "x-leaf " + std::to_string(g) + " is an output");
  }

  const Field f = phi.field();
  CircuitBuilder b(BlockSpec({{"z", n * N}, {"y", m}}), f);
  std::vector<GateId> outs;
  if (n >= 2 && N >= 2) {
    const Circuit minors = segre_minors(n - 1, N - 1, f);
    std::vector<GateId> id(minors.gate_count());
    for (GateId g : minors.topological_order()) {
      const Gate& gate = minors.gate(g);
      id[g] = gate.kind == GateKind::input ? b.leaf(0, gate.index) : b.add_gate(gate.kind);
      for (EdgeId e : minors.in_edges(g)) b.add_edge(id[minors.edge(e).source], id[g], minors.edge(e).weight);
    }
    for (GateId g : minors.outputs()) outs.push_back(id[g]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::optional<GateId>> id(phi.gate_count());
    for (GateId g : phi.topological_order()) {
      const Gate& gate = phi.gate(g);
      if (guard[g]) {
        const GateId s = b.add_sum();
        b.add_edge(b.leaf(0, guard[g]->x * N + guard[g]->t), s, guard[g]->weight);
        id[g] = s;
        continue;
      }
      if (gate.kind == GateKind::input) {
        if (gate.block == Y) id[g] = b.leaf(1, gate.index);
        if (gate.block == T) id[g] = b.leaf(0, j * N + gate.index);
        continue;  // x-leaves are only read through guarded products
      }
      const GateId ng = b.add_gate(gate.kind);
      for (EdgeId e : phi.in_edges(g)) b.add_edge(*id[phi.edge(e).source], ng, phi.edge(e).weight);
      id[g] = ng;
    }
    for (GateId g : phi.outputs()) outs.push_back(*id[g]);
  }
  // original outputs grouped by output, copies inside
  std::vector<GateId> ordered(outs.begin(), outs.end());
  const std::size_t minor_count = outs.size() - n * phi.outputs().size();
  for (std::size_t o = 0; o < phi.outputs().size(); ++o) {
    for (std::size_t j = 0; j < n; ++j) ordered[minor_count + o * n + j] = outs[minor_count + j * phi.outputs().size() + o];
  }
  for (GateId g : ordered) b.add_output(g);
  return std::move(b).build();
}

std::uint64_t pair_index(std::uint64_t n, std::uint64_t m) {
  if (n < 1) throw Error(ErrorKind::bad_parameters, "pair_index needs n >= 1");
  const std::uint64_t a = n - 1, s = a + m;
  return s * (s + 1) / 2 + m;
}

std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t k) {
  auto s = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(k) + 1) - 1) / 2);
  while (s * (s + 1) / 2 > k) --s;
  while ((s + 1) * (s + 2) / 2 <= k) ++s;
  const std::uint64_t m = k - s * (s + 1) / 2;
  return {s - m + 1, m};
}

}  // namespace projcx
