#include "projcx/embedder.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>
#include <unordered_map>

#include "projcx/normal_form.hpp"

namespace projcx {

namespace {

BiDegree to_bidegree(const MultiDegree& d) {
  return BiDegree{d.empty() ? 0u : d[0], d.size() > 1 ? d[1] : 0u};
}

std::size_t type_index(const UniversalLayout::Level& level, SplitType t) {
  auto it = std::find(level.types.begin(), level.types.end(), t);
  if (it == level.types.end()) {
    throw Error(ErrorKind::degree_not_representable, "split " + to_string(t.left) + "+" + to_string(t.right) + " missing at level " + to_string(level.degree));
  }
  return static_cast<std::size_t>(it - level.types.begin());
}

// One-point comparison of c against the universal circuit under tau. Both
// sides are exact, so any disagreement is a bug in the embedding.
void self_check(const Circuit& c, const UniversalLayout& layout, const Embedding& emb) {
  const std::uint64_t p = c.field().is_prime() ? c.field().modulus() : kMersenne31;
  const RestrictedCircuit r = restrict_controls(layout, emb.tau);
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::uint64_t> dist(0, p - 1);
  RawAssignment big{std::vector<std::uint64_t>(layout.n()), std::vector<std::uint64_t>(layout.m())};
  for (auto& block : big) {
    for (auto& v : block) v = dist(rng);
  }
  RawAssignment small;
  for (std::size_t b = 0; b < c.blocks().count(); ++b) {
    small.emplace_back(big[b].begin(), big[b].begin() + static_cast<std::ptrdiff_t>(c.blocks().size_of(b)));
  }
  const auto lhs = ModEvaluator(c, p).evaluate(small);
  const auto rhs = ModEvaluator(r.circuit, p).evaluate(big);
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    const auto& slot = r.output_index[emb.output_slot[i]];
    const std::uint64_t got = slot ? rhs[*slot] : 0;
    if (got != lhs[i]) throw std::logic_error("embedding self-check failed at output " + std::to_string(i));
  }
}

}  // namespace

LevelAnnotation assign_levels(const Circuit& c) {
  const NormalFormReport nf = check_normal_form(c);
  if (!nf.all_pass()) throw Error(ErrorKind::not_normal_form, "\n" + nf.describe());
  if (c.blocks().count() > 2) throw Error(ErrorKind::bad_parameters, "levels are defined for at most two blocks");
  const ValidationReport report = validate(c);
  LevelAnnotation out;
  out.gates.resize(c.gate_count());
  for (GateId g = 0; g < c.gate_count(); ++g) {
    auto& entry = out.gates[g];
    entry.role = c.gate(g).kind;
    entry.level = to_bidegree(report.degrees[g]);
    if (entry.role == GateKind::product) {
      const auto in = c.in_edges(g);
      BiDegree a = to_bidegree(report.degrees[c.edge(in[0]).source]);
      BiDegree b = to_bidegree(report.degrees[c.edge(in[1]).source]);
      if (b < a) std::swap(a, b);
      if (a.is_zero() || a + b != entry.level) throw std::logic_error("product level does not split into its children");
      entry.type = SplitType{a, b};
    }
  }
  return out;
}

Embedding embed(const Circuit& c, const UniversalLayout& layout) {
  const LevelAnnotation levels = assign_levels(c);
  if (c.blocks().size_of(0) > layout.n() || (c.blocks().count() > 1 && c.blocks().size_of(1) > layout.m())) {
    throw Error(ErrorKind::capacity_exceeded, "circuit blocks " + c.blocks().describe() + " exceed x:" + std::to_string(layout.n()) + " y:" +
                                                  std::to_string(layout.m()));
  }
  const auto& copies = layout.copies();
  const std::uint64_t s = layout.s();
  Embedding emb{ControlAssignment(c.field(), layout.edge_count()), {}, std::vector<std::vector<std::pair<GateId, std::uint64_t>>>(copies.size())};

  // outputs to copies: matching degree, first free slot
  std::vector<std::vector<std::pair<GateId, std::size_t>>> assigned(copies.size());
  for (std::size_t i = 0; i < c.outputs().size(); ++i) {
    const BiDegree deg = levels.gates[c.outputs()[i]].level;
    bool placed = false;
    for (std::size_t k = 0; k < copies.size() && !placed; ++k) {
      if (copies[k].top != deg || assigned[k].size() >= layout.n()) continue;
      emb.output_slot.push_back(k * layout.n() + assigned[k].size());
      assigned[k].emplace_back(c.outputs()[i], assigned[k].size());
      placed = true;
    }
    if (!placed) {
      const bool exists = std::any_of(copies.begin(), copies.end(), [&](const auto& cp) { return cp.top == deg; });
      throw Error(exists ? ErrorKind::capacity_exceeded : ErrorKind::degree_not_representable,
                  "output " + std::to_string(i) + " of degree " + to_string(deg) + (exists ? ": no free designated output" : ": no such degree in the universal circuit"));
    }
  }

  for (std::size_t k = 0; k < copies.size(); ++k) {
    if (assigned[k].empty()) continue;
    const auto& copy = copies[k];
    std::unordered_map<GateId, std::uint64_t> target;  // c gate -> universal gate
    std::vector<std::pair<GateId, std::size_t>> duplicate_slots;
    for (const auto& [g, slot] : assigned[k]) {
      if (!target.emplace(g, layout.output_gate(k, slot)).second) duplicate_slots.emplace_back(g, slot);
    }
    // positions of placed products, for the second pass
    struct Placed {
      std::size_t level, type;
      std::uint64_t k;
    };
    std::unordered_map<GateId, Placed> placed;
    std::vector<std::vector<std::uint64_t>> next(copy.levels.size());
    for (std::size_t l = 0; l < copy.levels.size(); ++l) next[l].assign(copy.levels[l].types.size(), 0);

    const auto& topo = c.topological_order();
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const GateId g = *it;
      if (c.gate(g).kind != GateKind::product) continue;
      bool used = false;
      for (EdgeId e : c.out_edges(g)) used = used || target.count(c.edge(e).target);
      if (!used) continue;
      const auto& ann = levels.gates[g];
      const std::size_t l = copy.level_index(ann.level);
      const std::size_t t = type_index(copy.levels[l], *ann.type);
      const std::uint64_t idx = next[l][t]++;
      if (idx >= s) {
        throw Error(ErrorKind::capacity_exceeded, "more than s = " + std::to_string(s) + " products of level " + to_string(ann.level) + " and type " +
                                                      to_string(ann.type->left) + "+" + to_string(ann.type->right));
      }
      placed.emplace(g, Placed{l, t, idx});
      target.emplace(g, layout.product_gate(k, l, t, idx));
      const auto in = c.in_edges(g);
      int side0 = levels.gates[c.edge(in[0]).source].level == ann.type->left ? 0 : 1;
      for (int i = 0; i < 2; ++i) {
        const int side = i == 0 ? side0 : 1 - side0;
        const Edge& edge = c.edge(in[i]);
        target.emplace(edge.source, layout.allocated_sum(k, l, t, idx, side));
        emb.tau.add(layout.sum_to_product_edge(k, l, t, idx, side), edge.weight);
      }
    }

    auto sum_weights = [&](GateId g, std::uint64_t phi_sum) {
      const GateInfo info = layout.gate_info(phi_sum);
      const std::size_t l = copy.level_index(info.level);
      for (EdgeId e : c.in_edges(g)) {
        const Edge& edge = c.edge(e);
        const Gate& src = c.gate(edge.source);
        std::uint64_t phi_edge;
        if (src.kind == GateKind::input) {
          phi_edge = layout.input_edge(k, l, info.index, src.index);
        } else {
          const Placed& p = placed.at(edge.source);
          phi_edge = layout.product_to_sum_edge(k, p.level, p.type, p.k, info.index);
        }
        emb.tau.add(phi_edge, edge.weight);
      }
    };
    for (const auto& [g, phi] : target) {
      if (c.gate(g).kind == GateKind::sum) sum_weights(g, phi);
    }
    for (const auto& [g, slot] : duplicate_slots) sum_weights(g, layout.output_gate(k, slot));

    std::vector<std::pair<GateId, std::uint64_t>> map(target.begin(), target.end());
    std::sort(map.begin(), map.end());
    emb.gate_map[k] = std::move(map);
  }
  self_check(c, layout, emb);
  return emb;
}

Reduction build_reduction(const Circuit& c, std::size_t n1, std::size_t n2) {
  const ValidationReport report = validate(c);
  std::uint32_t d = 0;
  for (const auto& deg : report.output_degrees) {
    for (std::uint32_t v : deg) d = std::max(d, v);
  }
  const std::uint64_t q = std::max<std::uint64_t>({n1 + n2 + 1, d, c.size()});
  return build_reduction(c, n1, n2, ucr_layout(q, n2));
}

Reduction build_reduction(const Circuit& c, std::size_t n1, std::size_t n2, UniversalLayout layout) {
  if (c.blocks().count() != 2 || c.blocks().size_of(0) != n1 || c.blocks().size_of(1) != n2) {
    throw Error(ErrorKind::shape_mismatch, "expected blocks of sizes " + std::to_string(n1) + "," + std::to_string(n2) + ", got " + c.blocks().describe());
  }
  if (c.outputs().empty()) throw Error(ErrorKind::bad_parameters, "circuit has no outputs");
  if (layout.n() < n1 || layout.m() != n2) throw Error(ErrorKind::bad_parameters, "layout does not fit the circuit's blocks");
  const ValidationReport report = validate(c);
  std::uint32_t d = 0;
  for (const auto& deg : report.output_degrees) {
    for (std::uint32_t v : deg) d = std::max(d, v);
  }
  const std::uint64_t q = layout.n();
  const Circuit normal = normalize(c);
  Embedding emb = embed(normal, layout);

  const Field f = c.field();
  LinearPart pad{0, std::vector<std::vector<FieldElem>>(q, std::vector<FieldElem>(n1, FieldElem::zero(f)))};
  for (std::size_t i = 0; i < n1; ++i) pad.matrix[i][i] = FieldElem::one(f);
  std::vector<MapComponent> comps;
  comps.emplace_back(std::move(pad));
  comps.emplace_back(ConstantPart{emb.tau});
  PLinearMap rho(BlockSpec({{"x", n1}}), BlockSpec({{"x", q}, {"t", layout.edge_count()}}), f, std::move(comps));
  return Reduction{n1, n2, d, c.size(), q, std::move(layout), std::move(emb), std::move(rho)};
}

std::string serialize_tau(const UniversalLayout& layout, const ControlAssignment& tau, bool sparse) {
  std::ostringstream os;
  os << "tau n " << layout.n() << " m " << layout.m() << " s " << layout.s() << " tops";
  for (BiDegree t : layout.tops()) os << ' ' << t.x << ',' << t.y;
  os << " N " << layout.edge_count() << " field " << (tau.field().is_prime() ? "gf:" + std::to_string(tau.field().modulus()) : "q") << '\n';
  if (sparse) {
    os << "format sparse\n";
    for (const auto& [i, v] : tau.nonzeros()) os << i << ' ' << v << '\n';
  } else {
    for (std::uint64_t i = 0; i < tau.length(); ++i) os << tau[i] << '\n';
  }
  return os.str();
}

std::pair<UniversalLayout, ControlAssignment> parse_tau(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  auto bad = [](const std::string& why) { return Error(ErrorKind::syntax_error, "tau file: " + why); };
  if (!std::getline(in, line)) throw bad("empty");
  std::istringstream head(line);
  std::string word;
  std::size_t n = 0, m = 0;
  std::uint64_t s = 0, declared = 0;
  std::vector<BiDegree> tops;
  std::optional<Field> field;
  head >> word;
  if (word != "tau") throw bad("missing 'tau' header");
  while (head >> word) {
    if (word == "n") {
      head >> n;
    } else if (word == "m") {
      head >> m;
    } else if (word == "s") {
      head >> s;
    } else if (word == "N") {
      head >> declared;
    } else if (word == "field") {
      head >> word;
      field = parse_field(word);
    } else if (word == "tops") {
      while (head.peek() == ' ') head.get();
      while (head && std::isdigit(head.peek())) {
        BiDegree t;
        char comma;
        head >> t.x >> comma >> t.y;
        tops.push_back(t);
        while (head.peek() == ' ') head.get();
      }
    } else {
      throw bad("unknown header key '" + word + "'");
    }
    if (!head) throw bad("malformed header");
  }
  if (!field) throw bad("missing field");
  UniversalLayout layout(n, m, s, tops);
  if (layout.edge_count() != declared) throw bad("N = " + std::to_string(declared) + " does not match the layout's " + std::to_string(layout.edge_count()));
  ControlAssignment tau(*field, declared);
  std::uint64_t row = 0;
  bool sparse = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line == "format sparse") {
      sparse = true;
      continue;
    }
    if (sparse) {
      std::istringstream ls(line);
      std::uint64_t i;
      std::string v;
      if (!(ls >> i >> v) || i >= declared) throw bad("bad sparse entry '" + line + "'");
      tau.set(i, parse_elem(*field, v));
    } else {
      if (row >= declared) throw bad("more than N values");
      tau.set(row++, parse_elem(*field, line));
    }
  }
  if (!sparse && row != declared) throw Error(ErrorKind::length_mismatch, "tau has " + std::to_string(row) + " values, expected " + std::to_string(declared));
  return {std::move(layout), std::move(tau)};
}

}  // namespace projcx
