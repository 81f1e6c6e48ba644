#include "projcx/universal.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace projcx {

std::string to_string(BiDegree d) { return "(" + std::to_string(d.x) + "," + std::to_string(d.y) + ")"; }

namespace {

std::vector<BiDegree> levels_below(BiDegree top) {
  std::vector<BiDegree> out;
  for (std::uint32_t x = 0; x <= top.x; ++x) {
    for (std::uint32_t y = 0; y <= top.y; ++y) {
      if (x || y) out.push_back({x, y});
    }
  }
  std::sort(out.begin(), out.end(), [](BiDegree a, BiDegree b) {
    return std::tuple(a.total(), a.y, a.x) < std::tuple(b.total(), b.y, b.x);
  });
  return out;
}

std::vector<SplitType> splits_of(BiDegree level) {
  std::vector<SplitType> out;
  for (std::uint32_t x = 0; x <= level.x; ++x) {
    for (std::uint32_t y = 0; y <= level.y; ++y) {
      const BiDegree part{x, y};
      const BiDegree rest = level - part;
      if (part.is_zero() || rest.is_zero() || rest < part) continue;
      out.push_back({part, rest});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) throw Error(ErrorKind::resource_limit, "universal circuit size overflows 64 bits");
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a) throw Error(ErrorKind::resource_limit, "universal circuit size overflows 64 bits");
  return a + b;
}

}  // namespace

std::uint64_t sum_multiplier(BiDegree top) {
  const auto levels = levels_below(top);
  std::map<BiDegree, std::uint64_t> demand;
  for (BiDegree l : levels) {
    if (l.total() < 2) continue;
    for (const SplitType& t : splits_of(l)) {
      ++demand[t.left];
      ++demand[t.right];
    }
  }
  std::uint64_t mult = std::uint64_t{std::max(top.x, 1u)} * std::max(top.y, 1u);
  for (const auto& [level, d] : demand) mult = std::max(mult, d);
  return mult;
}

std::size_t UniversalLayout::Copy::level_index(BiDegree d) const {
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i].degree == d) return i;
  }
  throw Error(ErrorKind::degree_not_representable, "level " + to_string(d) + " not in copy " + to_string(top));
}

UniversalLayout::UniversalLayout(std::size_t n, std::size_t m, std::uint64_t s, std::vector<BiDegree> tops) : n_(n), m_(m), s_(s) {
  if (n == 0) throw Error(ErrorKind::bad_parameters, "need at least one x-input");
  if (s < n) throw Error(ErrorKind::bad_parameters, "s must be at least n to hold the outputs");
  if (tops.empty()) throw Error(ErrorKind::bad_parameters, "no degree pairs");
  std::uint64_t gate = n + m;
  std::uint64_t edge = 0;
  for (BiDegree top : tops) {
    if (top.is_zero()) throw Error(ErrorKind::bad_parameters, "degree pair (0,0)");
    if (top.y > 0 && m == 0) throw Error(ErrorKind::bad_parameters, "y-degree " + std::to_string(top.y) + " without y-inputs");
    Copy copy;
    copy.top = top;
    copy.sum_multiplier = sum_multiplier(top);
    const std::uint64_t per_level = checked_mul(copy.sum_multiplier, s);
    for (BiDegree d : levels_below(top)) {
      Level level;
      level.degree = d;
      if (d.total() >= 2) level.types = splits_of(d);
      level.sum_count = per_level;
      copy.levels.push_back(std::move(level));
    }
    for (auto& level : copy.levels) {
      for (const SplitType& t : level.types) {
        const std::size_t a = copy.level_index(t.left);
        const std::size_t b = copy.level_index(t.right);
        level.child_level[0].push_back(a);
        level.child_level[1].push_back(b);
        if (a == b) {
          level.alloc_start[0].push_back(copy.levels[a].consumed);
          level.alloc_start[1].push_back(copy.levels[a].consumed);
          copy.levels[a].consumed += 2 * s;
        } else {
          level.alloc_start[0].push_back(copy.levels[a].consumed);
          copy.levels[a].consumed += s;
          level.alloc_start[1].push_back(copy.levels[b].consumed);
          copy.levels[b].consumed += s;
        }
      }
    }
    for (const auto& level : copy.levels) {
      // the builder's counting argument: allocation never exhausts a level
      if (level.consumed > level.sum_count) {
        throw std::logic_error("sum level " + to_string(level.degree) + " exhausted");
      }
    }
    for (auto& level : copy.levels) {
      level.product_base = gate;
      gate = checked_add(gate, checked_mul(level.types.size(), s));
      level.sum_base = gate;
      gate = checked_add(gate, level.sum_count);
      if (level.unit()) {
        level.sum_fan_in = level.degree.x == 1 ? n : m;
      } else {
        level.sum_fan_in = level.product_count(s);
      }
      level.edge_base = edge;
      edge = checked_add(edge, checked_mul(2, level.product_count(s)));
      level.sum_edge_base = edge;
      edge = checked_add(edge, checked_mul(level.sum_count, level.sum_fan_in));
    }
    copies_.push_back(std::move(copy));
  }
  for (std::size_t c = 0; c < copies_.size(); ++c) {
    for (std::size_t l = 0; l < copies_[c].levels.size(); ++l) flat_.push_back({c, l});
  }
  gate_count_ = gate;
  edge_count_ = edge;
}

std::vector<BiDegree> UniversalLayout::tops() const {
  std::vector<BiDegree> out;
  for (const auto& c : copies_) out.push_back(c.top);
  return out;
}

std::uint64_t UniversalLayout::sum_gate(std::size_t copy, std::size_t level, std::uint64_t j) const {
  const Level& l = level_at(copy, level);
  if (j >= l.sum_count) throw Error(ErrorKind::bad_parameters, "sum index out of range");
  return l.sum_base + j;
}

std::uint64_t UniversalLayout::product_gate(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k) const {
  const Level& l = level_at(copy, level);
  if (type >= l.types.size() || k >= s_) throw Error(ErrorKind::bad_parameters, "product index out of range");
  return l.product_base + type * s_ + k;
}

std::uint64_t UniversalLayout::output_gate(std::size_t copy, std::size_t slot) const {
  if (slot >= n_) throw Error(ErrorKind::bad_parameters, "output slot out of range");
  return sum_gate(copy, copies_.at(copy).levels.size() - 1, slot);
}

std::uint64_t UniversalLayout::allocated_sum(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k, int side) const {
  const Level& l = level_at(copy, level);
  const std::size_t child = l.child_level[side].at(type);
  const bool same = l.child_level[0][type] == l.child_level[1][type];
  const std::uint64_t j = same ? l.alloc_start[0][type] + 2 * k + side : l.alloc_start[side][type] + k;
  return sum_gate(copy, child, j);
}

std::uint64_t UniversalLayout::input_edge(std::size_t copy, std::size_t level, std::uint64_t sum_j, std::size_t input_i) const {
  const Level& l = level_at(copy, level);
  if (!l.unit() || input_i >= l.sum_fan_in || sum_j >= l.sum_count) throw Error(ErrorKind::bad_parameters, "no such input edge");
  return l.sum_edge_base + sum_j * l.sum_fan_in + input_i;
}

std::uint64_t UniversalLayout::product_to_sum_edge(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k,
                                                   std::uint64_t sum_j) const {
  const Level& l = level_at(copy, level);
  if (l.unit() || type >= l.types.size() || k >= s_ || sum_j >= l.sum_count) throw Error(ErrorKind::bad_parameters, "no such product edge");
  return l.sum_edge_base + sum_j * l.sum_fan_in + type * s_ + k;
}

std::uint64_t UniversalLayout::sum_to_product_edge(std::size_t copy, std::size_t level, std::size_t type, std::uint64_t k, int side) const {
  const Level& l = level_at(copy, level);
  if (type >= l.types.size() || k >= s_) throw Error(ErrorKind::bad_parameters, "no such product");
  return l.edge_base + 2 * (type * s_ + k) + side;
}

GateInfo UniversalLayout::gate_info(std::uint64_t gate) const {
  if (gate < n_) return GateInfo{GateRole::x_input, 0, {}, 0, gate};
  if (gate < n_ + m_) return GateInfo{GateRole::y_input, 0, {}, 0, gate - n_};
  if (gate >= gate_count_) throw Error(ErrorKind::bad_parameters, "gate id out of range");
  auto it = std::upper_bound(flat_.begin(), flat_.end(), gate,
                             [&](std::uint64_t g, const LevelRef& r) { return g < level_at(r.copy, r.level).product_base; });
  const LevelRef ref = *std::prev(it);
  const Level& l = level_at(ref.copy, ref.level);
  if (gate < l.sum_base) {
    const std::uint64_t off = gate - l.product_base;
    return GateInfo{GateRole::product, ref.copy, l.degree, static_cast<std::size_t>(off / s_), off % s_};
  }
  return GateInfo{GateRole::sum, ref.copy, l.degree, 0, gate - l.sum_base};
}

EdgeInfo UniversalLayout::edge_info(std::uint64_t edge) const {
  if (edge >= edge_count_) throw Error(ErrorKind::bad_parameters, "edge id out of range");
  auto it = std::upper_bound(flat_.begin(), flat_.end(), edge,
                             [&](std::uint64_t e, const LevelRef& r) { return e < level_at(r.copy, r.level).edge_base; });
  const LevelRef ref = *std::prev(it);
  const Level& l = level_at(ref.copy, ref.level);
  if (edge < l.sum_edge_base) {
    const std::uint64_t off = edge - l.edge_base;
    const std::uint64_t product = off / 2;
    const int side = static_cast<int>(off % 2);
    const std::size_t type = product / s_;
    const std::uint64_t k = product % s_;
    return EdgeInfo{allocated_sum(ref.copy, ref.level, type, k, side), l.product_base + product};
  }
  const std::uint64_t off = edge - l.sum_edge_base;
  const std::uint64_t j = off / l.sum_fan_in;
  const std::uint64_t i = off % l.sum_fan_in;
  std::uint64_t source;
  if (l.unit()) {
    source = l.degree.x == 1 ? x_input(i) : y_input(i);
  } else {
    source = l.product_base + i;
  }
  return EdgeInfo{source, l.sum_base + j};
}

Circuit UniversalLayout::materialize(Field field, std::uint64_t gate_budget) const {
  if (gate_count_ > gate_budget || edge_count_ > gate_budget) {
    throw Error(ErrorKind::resource_limit, "universal circuit with " + std::to_string(gate_count_) + " gates and " + std::to_string(edge_count_) +
                                               " edges exceeds the budget of " + std::to_string(gate_budget));
  }
  CircuitBuilder b(BlockSpec({{"x", n_}, {"y", m_}}), field);
  for (std::size_t i = 0; i < n_; ++i) b.add_input(0, i);
  for (std::size_t i = 0; i < m_; ++i) b.add_input(1, i);
  const FieldElem zero = FieldElem::zero(field);
  for (const LevelRef& ref : flat_) {
    const Level& l = level_at(ref.copy, ref.level);
    for (std::uint64_t k = 0; k < l.product_count(s_); ++k) b.add_product();
    for (std::uint64_t j = 0; j < l.sum_count; ++j) b.add_sum();
    for (std::size_t t = 0; t < l.types.size(); ++t) {
      for (std::uint64_t k = 0; k < s_; ++k) {
        const GateId p = l.product_base + t * s_ + k;
        b.add_edge(allocated_sum(ref.copy, ref.level, t, k, 0), p, zero);
        b.add_edge(allocated_sum(ref.copy, ref.level, t, k, 1), p, zero);
      }
    }
    for (std::uint64_t j = 0; j < l.sum_count; ++j) {
      for (std::uint64_t i = 0; i < l.sum_fan_in; ++i) {
        const GateId src = l.unit() ? (l.degree.x == 1 ? x_input(i) : y_input(i)) : l.product_base + i;
        b.add_edge(src, l.sum_base + j, zero);
      }
    }
  }
  for (std::size_t c = 0; c < copies_.size(); ++c) {
    for (std::size_t slot = 0; slot < n_; ++slot) b.add_output(output_gate(c, slot));
  }
  return std::move(b).build();
}

std::pair<Circuit, UniversalLayout> build_universal(std::size_t n, std::size_t m, std::uint32_t r1, std::uint32_t r2, std::uint64_t s,
                                                    Field field) {
  if (n < 1) throw Error(ErrorKind::bad_parameters, "n must be at least 1");
  if (r1 == 0 && r2 == 0) throw Error(ErrorKind::bad_parameters, "bidegree (0,0)");
  if (s < n + m) throw Error(ErrorKind::bad_parameters, "s = " + std::to_string(s) + " is below n + m = " + std::to_string(n + m));
  UniversalLayout layout(n, m, s, {BiDegree{r1, r2}});
  Circuit phi = layout.materialize(field);
  return {std::move(phi), std::move(layout)};
}

std::vector<BiDegree> all_degree_pairs(std::uint32_t r, std::size_t m) {
  std::vector<BiDegree> out;
  for (std::uint32_t x = 0; x <= r; ++x) {
    for (std::uint32_t y = 0; y <= (m == 0 ? 0 : r); ++y) {
      if (x || y) out.push_back({x, y});
    }
  }
  return out;
}

UniversalLayout universal_alldeg_layout(std::size_t n, std::size_t m, std::uint32_t r, std::uint64_t s) {
  if (n < 1 || r < 1) throw Error(ErrorKind::bad_parameters, "need n >= 1 and r >= 1");
  if (s < std::uint64_t{r} * (n + m)) {
    throw Error(ErrorKind::bad_parameters, "s = " + std::to_string(s) + " is below r (n + m) = " + std::to_string(std::uint64_t{r} * (n + m)));
  }
  return UniversalLayout(n, m, s, all_degree_pairs(r, m));
}

std::pair<Circuit, UniversalLayout> build_universal_alldeg(std::size_t n, std::size_t m, std::uint32_t r, std::uint64_t s, Field field) {
  UniversalLayout layout = universal_alldeg_layout(n, m, r, s);
  Circuit phi = layout.materialize(field);
  return {std::move(phi), std::move(layout)};
}

std::pair<Circuit, ControlTable> controlize(const Circuit& phi) {
  if (phi.blocks().find("t")) throw Error(ErrorKind::bad_parameters, "circuit already has a block named 't'");
  std::vector<Block> blocks = phi.blocks().blocks();
  const std::uint64_t n_controls = phi.edge_count();
  blocks.push_back({"t", n_controls});
  const Field f = phi.field();
  CircuitBuilder b(BlockSpec(std::move(blocks)), f);
  for (const Gate& g : phi.gates()) {
    if (g.kind == GateKind::input) {
      b.add_input(g.block, g.index);
    } else {
      b.add_gate(g.kind);
    }
  }
  const std::size_t t_block = phi.blocks().count();
  for (EdgeId e = 0; e < phi.edge_count(); ++e) {
    const GateId t = b.add_input(t_block, e);
    const GateId p = b.add_product();
    b.add_edge(phi.edge(e).source, p, 1);
    b.add_edge(t, p, 1);
    b.add_edge(p, phi.edge(e).target, 1);
  }
  for (GateId g : phi.outputs()) b.add_output(g);
  return {std::move(b).build(), ControlTable{n_controls, phi.gate_count()}};
}

std::uint32_t controlled_t_degree(std::uint32_t total_level_degree) { return 4 * total_level_degree - 3; }

RestrictedCircuit restrict_controls(const UniversalLayout& layout, const SparseVector& tau) {
  if (tau.length() != layout.edge_count()) {
    throw Error(ErrorKind::length_mismatch, "tau has length " + std::to_string(tau.length()) + ", layout has " + std::to_string(layout.edge_count()) + " controls");
  }
  struct InEdge {
    std::uint64_t source;
    std::uint64_t edge;
  };
  std::unordered_map<std::uint64_t, std::vector<InEdge>> live_in;
  for (const auto& [e, w] : tau.nonzeros()) {
    const EdgeInfo info = layout.edge_info(e);
    live_in[info.target].push_back({info.source, e});
  }
  auto live_edges = [&](std::uint64_t g) -> const std::vector<InEdge>& {
    static const std::vector<InEdge> none;
    auto it = live_in.find(g);
    return it == live_in.end() ? none : it->second;
  };

  std::unordered_map<std::uint64_t, bool> zero_memo;
  std::function<bool(std::uint64_t)> is_zero = [&](std::uint64_t g) -> bool {
    if (auto it = zero_memo.find(g); it != zero_memo.end()) return it->second;
    const GateInfo info = layout.gate_info(g);
    bool zero;
    if (info.role == GateRole::x_input || info.role == GateRole::y_input) {
      zero = false;
    } else if (info.role == GateRole::product) {
      const auto& in = live_edges(g);
      zero = in.size() < 2;  // a product with a zero control factor vanishes
      for (const auto& ie : in) zero = zero || is_zero(ie.source);
    } else {
      zero = true;
      for (const auto& ie : live_edges(g)) zero = zero && is_zero(ie.source);
    }
    zero_memo.emplace(g, zero);
    return zero;
  };

  const Field f = tau.field();
  CircuitBuilder b(BlockSpec({{"x", layout.n()}, {"y", layout.m()}}), f);
  std::unordered_map<std::uint64_t, GateId> built;
  std::function<GateId(std::uint64_t)> build = [&](std::uint64_t g) -> GateId {
    if (auto it = built.find(g); it != built.end()) return it->second;
    const GateInfo info = layout.gate_info(g);
    GateId id;
    if (info.role == GateRole::x_input) {
      id = b.leaf(0, info.index);
    } else if (info.role == GateRole::y_input) {
      id = b.leaf(1, info.index);
    } else {
      std::vector<GateId> controlled;
      for (const auto& ie : live_edges(g)) {
        if (is_zero(ie.source)) continue;
        const GateId child = build(ie.source);
        const GateId p = b.add_product();
        b.add_edge(child, p, tau[ie.edge]);
        controlled.push_back(p);
      }
      id = info.role == GateRole::sum ? b.add_sum() : b.add_product();
      for (GateId p : controlled) b.add_edge(p, id, 1);
    }
    built.emplace(g, id);
    return id;
  };

  RestrictedCircuit out{Circuit(CircuitBuilder(BlockSpec({{"x", layout.n()}, {"y", layout.m()}}), f).build()), {}};
  std::size_t next = 0;
  for (std::size_t c = 0; c < layout.copies().size(); ++c) {
    for (std::size_t slot = 0; slot < layout.n(); ++slot) {
      const std::uint64_t g = layout.output_gate(c, slot);
      if (is_zero(g)) {
        out.output_index.push_back(std::nullopt);
      } else {
        b.add_output(build(g));
        out.output_index.push_back(next++);
      }
    }
  }
  out.circuit = std::move(b).build();
  return out;
}

UniversalLayout ucr_layout(std::size_t n, std::size_t m) {
  if (n < 1) throw Error(ErrorKind::bad_parameters, "n must be at least 1");
  const std::uint64_t s = std::uint64_t{n} * n + n + m;
  return UniversalLayout(n, m, s, all_degree_pairs(static_cast<std::uint32_t>(n), m));
}

UcrParams ucr_params(std::size_t n, std::size_t m, std::uint64_t gate_budget, bool allow_formula) {
  const UniversalLayout layout = ucr_layout(n, m);
  UcrParams p;
  p.n = n;
  p.m = m;
  p.r = static_cast<std::uint32_t>(n);
  p.s = layout.s();
  p.n_controls = layout.edge_count();
  p.outputs = layout.output_count();
  p.phi_gates = layout.gate_count();
  p.phi_prime_gates = checked_add(p.phi_gates, checked_mul(2, p.n_controls));
  p.claimed_outputs = std::uint64_t{n} * n * n * n;
  if (p.phi_prime_gates <= gate_budget) {
    const Circuit phi = layout.materialize(Field::rationals(), gate_budget);
    const auto [phi_prime, table] = controlize(phi);
    if (table.n_controls != p.n_controls || phi_prime.outputs().size() != p.outputs || phi_prime.gate_count() != p.phi_prime_gates) {
      throw std::logic_error("closed-form counts disagree with the constructed circuit");
    }
    p.materialized = true;
  } else if (!allow_formula) {
    throw Error(ErrorKind::resource_limit, "Phi' for (n,m) = (" + std::to_string(n) + "," + std::to_string(m) + ") has " +
                                               std::to_string(p.phi_prime_gates) + " gates, above the budget of " + std::to_string(gate_budget));
  }
  p.ambient = {n - 1, p.n_controls - 1};
  return p;
}

std::string serialize_layout(const UniversalLayout& layout) {
  std::ostringstream os;
  os << "layout n " << layout.n() << " m " << layout.m() << " s " << layout.s() << " tops";
  for (BiDegree t : layout.tops()) os << ' ' << t.x << ',' << t.y;
  os << '\n';
  for (std::uint64_t g = 0; g < layout.gate_count(); ++g) {
    const GateInfo info = layout.gate_info(g);
    os << "gate " << g << ' ';
    switch (info.role) {
      case GateRole::x_input: os << "input x " << info.index; break;
      case GateRole::y_input: os << "input y " << info.index; break;
      case GateRole::sum: os << "sum " << info.copy << ' ' << info.level.x << ',' << info.level.y; break;
      case GateRole::product: {
        const auto& level = layout.copies()[info.copy].levels[layout.copies()[info.copy].level_index(info.level)];
        const SplitType& t = level.types[info.type];
        os << "prod " << info.copy << ' ' << info.level.x << ',' << info.level.y << " type " << t.left.x << ',' << t.left.y << '+' << t.right.x << ','
           << t.right.y;
        break;
      }
    }
    os << '\n';
  }
  for (std::uint64_t e = 0; e < layout.edge_count(); ++e) {
    const EdgeInfo info = layout.edge_info(e);
    os << "edge " << e << ' ' << info.source << ' ' << info.target << " t " << e << '\n';
  }
  return os.str();
}

std::string describe_layout(const UniversalLayout& layout) {
  std::ostringstream os;
  os << "n " << layout.n() << "\nm " << layout.m() << "\ns " << layout.s() << '\n';
  os << "gates " << layout.gate_count() << "\nedges " << layout.edge_count() << '\n';
  os << "controls_N " << layout.edge_count() << "\noutputs_M " << layout.output_count() << '\n';
  os << "controlled_gates " << layout.gate_count() + 2 * layout.edge_count() << '\n';
  for (const auto& copy : layout.copies()) {
    std::uint64_t products = 0, sums = 0;
    for (const auto& l : copy.levels) {
      products += l.product_count(layout.s());
      sums += l.sum_count;
    }
    os << "copy " << to_string(copy.top) << " levels " << copy.levels.size() << " sum_per_level " << copy.sum_multiplier << "*s"
       << " sums " << sums << " products " << products << " output_degree x=" << copy.top.x << " y=" << copy.top.y
       << " t=" << controlled_t_degree(copy.top.total()) << '\n';
  }
  return os.str();
}

}  // namespace projcx
