#include "projcx/slp.hpp"

#include <charconv>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

namespace projcx {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void syntax(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::syntax_error, "line " + std::to_string(line) + ": " + what);
}

std::size_t parse_count(std::string_view s, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) syntax(line, "expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s.front())) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

// A defined name is either a gate or a folded constant.
using Value = std::variant<GateId, FieldElem>;

struct Operand {
  FieldElem weight;
  Value value;
};

// Gate ids follow `g<k>` names when those cover every gate exactly once, so
// serialized circuits reload with the same ids.
Circuit adopt_serialized_ids(Circuit c, const std::map<std::string, Value, std::less<>>& names) {
  const std::size_t n = c.gate_count();
  std::vector<GateId> to_new(n, n);
  std::vector<bool> taken(n, false);
  for (const auto& [name, value] : names) {
    if (!std::holds_alternative<GateId>(value)) continue;
    if (name.size() < 2 || name[0] != 'g') return c;
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), k);
    if (ec != std::errc() || ptr != name.data() + name.size() || k >= n || taken[k]) return c;
    if (name.size() > 2 && name[1] == '0') return c;
    taken[k] = true;
    to_new[std::get<GateId>(value)] = k;
  }
  std::vector<GateId> to_old(n);
  for (GateId g = 0; g < n; ++g) {
    if (to_new[g] == n) return c;
    to_old[to_new[g]] = g;
  }
  bool identity = true;
  for (GateId g = 0; g < n; ++g) identity = identity && to_new[g] == g;
  if (identity) return c;
  CircuitBuilder b(c.blocks(), c.field());
  for (GateId k = 0; k < n; ++k) {
    const Gate& gate = c.gate(to_old[k]);
    if (gate.kind == GateKind::input) {
      b.add_input(gate.block, gate.index);
    } else {
      b.add_gate(gate.kind);
    }
  }
  for (const Edge& e : c.edges()) b.add_edge(to_new[e.source], to_new[e.target], e.weight);
  for (GateId g : c.outputs()) b.add_output(to_new[g]);
  return std::move(b).build();
}

}  // namespace

Circuit parse_slp(std::string_view text) {
  std::optional<BlockSpec> blocks;
  std::optional<Field> field;
  std::optional<CircuitBuilder> builder;
  std::map<std::string, Value, std::less<>> names;
  bool have_outputs = false;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) {
      if (end == text.size()) break;
      continue;
    }

    auto ensure_builder = [&] {
      if (builder) return;
      if (!blocks || !field) syntax(line_no, "'blocks' and 'field' must precede instructions");
      builder.emplace(*blocks, *field);
    };

    if (tok[0] == "blocks") {
      if (blocks) syntax(line_no, "duplicate 'blocks' line");
      std::vector<Block> list;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto colon = tok[i].find(':');
        if (colon == std::string_view::npos) syntax(line_no, "block must be name:count");
        list.push_back(Block{std::string(tok[i].substr(0, colon)), parse_count(tok[i].substr(colon + 1), line_no)});
      }
      try {
        blocks.emplace(std::move(list));
      } catch (const Error& e) {
        syntax(line_no, e.what());
      }
    } else if (tok[0] == "field") {
      if (field) syntax(line_no, "duplicate 'field' line");
      if (tok.size() == 2 && tok[1] == "q") {
        field = Field::rationals();
      } else if (tok.size() == 3 && tok[1] == "gf") {
        try {
          field = Field::prime(parse_count(tok[2], line_no));
        } catch (const Error& e) {
          syntax(line_no, e.what());
        }
      } else {
        syntax(line_no, "expected 'field gf P' or 'field q'");
      }
    } else if (tok[0] == "outputs") {
      if (have_outputs) syntax(line_no, "duplicate 'outputs' line");
      ensure_builder();
      have_outputs = true;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        auto it = names.find(tok[i]);
        if (it == names.end()) throw Error(ErrorKind::unknown_gate_ref, "line " + std::to_string(line_no) + ": '" + std::string(tok[i]) + "'");
        if (!std::holds_alternative<GateId>(it->second)) syntax(line_no, "constant '" + std::string(tok[i]) + "' cannot be an output");
        builder->add_output(std::get<GateId>(it->second));
      }
    } else {
      if (tok.size() < 3 || tok[1] != "=") syntax(line_no, "expected 'name = op ...'");
      ensure_builder();
      const std::string name(tok[0]);
      if (!valid_name(name)) syntax(line_no, "bad gate name '" + name + "'");
      if (names.contains(name)) throw Error(ErrorKind::duplicate_id, "line " + std::to_string(line_no) + ": '" + name + "'");
      const std::string_view op = tok[2];
      const Field f = *field;

      if (op == "input") {
        if (tok.size() != 5) syntax(line_no, "expected 'name = input BLOCK INDEX'");
        auto b = blocks->find(tok[3]);
        if (!b) syntax(line_no, "unknown block '" + std::string(tok[3]) + "'");
        const std::size_t idx = parse_count(tok[4], line_no);
        if (idx >= blocks->size_of(*b)) syntax(line_no, "index out of range for block '" + std::string(tok[3]) + "'");
        names.emplace(name, builder->add_input(*b, idx));
      } else if (op == "const") {
        if (tok.size() != 4) syntax(line_no, "expected 'name = const VALUE'");
        try {
          names.emplace(name, parse_elem(f, tok[3]));
        } catch (const Error& e) {
          syntax(line_no, e.what());
        }
      } else if (op == "sum" || op == "prod") {
        if (tok.size() < 4) syntax(line_no, "operator without operands");
        std::vector<Operand> operands;
        for (std::size_t i = 3; i < tok.size(); ++i) {
          std::string_view t = tok[i];
          FieldElem w = FieldElem::one(f);
          if (auto star = t.rfind('*'); star != std::string_view::npos) {
            try {
              w = parse_elem(f, t.substr(0, star));
            } catch (const Error& e) {
              syntax(line_no, e.what());
            }
            t = t.substr(star + 1);
          }
          auto it = names.find(t);
          if (it == names.end()) throw Error(ErrorKind::unknown_gate_ref, "line " + std::to_string(line_no) + ": '" + std::string(t) + "'");
          operands.push_back(Operand{w, it->second});
        }
        std::size_t constants = 0;
        for (const auto& o : operands) constants += std::holds_alternative<FieldElem>(o.value);

        if (op == "sum") {
          if (constants == operands.size()) {
            FieldElem acc = FieldElem::zero(f);
            for (const auto& o : operands) acc += o.weight * std::get<FieldElem>(o.value);
            names.emplace(name, acc);
          } else if (constants > 0) {
            syntax(line_no, "sum mixes constants with non-constant terms (not homogeneous)");
          } else {
            const GateId g = builder->add_sum();
            for (const auto& o : operands) builder->add_edge(std::get<GateId>(o.value), g, o.weight);
            names.emplace(name, g);
          }
        } else {
          FieldElem factor = FieldElem::one(f);
          for (const auto& o : operands) {
            if (std::holds_alternative<FieldElem>(o.value)) factor *= o.weight * std::get<FieldElem>(o.value);
          }
          if (constants == operands.size()) {
            names.emplace(name, factor);
          } else {
            const GateId g = builder->add_product();
            bool first = true;
            for (const auto& o : operands) {
              if (!std::holds_alternative<GateId>(o.value)) continue;
              builder->add_edge(std::get<GateId>(o.value), g, first ? factor * o.weight : o.weight);
              first = false;
            }
            names.emplace(name, g);
          }
        }
      } else {
        syntax(line_no, "unknown operation '" + std::string(op) + "'");
      }
    }
    if (end == text.size()) break;
  }
  if (!blocks) throw Error(ErrorKind::syntax_error, "missing 'blocks' line");
  if (!field) throw Error(ErrorKind::syntax_error, "missing 'field' line");
  if (!have_outputs) throw Error(ErrorKind::syntax_error, "missing 'outputs' line");
  return adopt_serialized_ids(std::move(*builder).build(), names);
}

std::string serialize_slp(const Circuit& c) {
  std::ostringstream os;
  os << "blocks " << c.blocks().describe() << '\n';
  os << "field " << c.field().describe() << '\n';
  for (GateId g : c.topological_order()) {
    const Gate& gate = c.gate(g);
    os << 'g' << g << " = ";
    switch (gate.kind) {
      case GateKind::input:
        os << "input " << c.blocks()[gate.block].name << ' ' << gate.index;
        break;
      case GateKind::sum:
      case GateKind::product:
        os << (gate.kind == GateKind::sum ? "sum" : "prod");
        for (EdgeId e : c.in_edges(g)) os << ' ' << c.edge(e).weight << "*g" << c.edge(e).source;
        break;
    }
    os << '\n';
  }
  os << "outputs";
  for (GateId g : c.outputs()) os << " g" << g;
  os << '\n';
  return os.str();
}

std::string export_dot(const Circuit& c) {
  std::optional<ValidationReport> report;
  try {
    report = validate(c);
  } catch (const Error&) {
    // inhomogeneous circuits are drawn without degrees
  }
  std::ostringstream os;
  os << "digraph circuit {\n  rankdir=BT;\n";
  for (GateId g = 0; g < c.gate_count(); ++g) {
    const Gate& gate = c.gate(g);
    std::string kind = gate.kind == GateKind::input ? "input " + c.blocks()[gate.block].name + std::to_string(gate.index)
                       : gate.kind == GateKind::sum ? "sum"
                                                    : "prod";
    os << "  g" << g << " [label=\"" << kind << ':' << (report ? to_string(report->degrees[g]) : "?") << '"';
    if (c.is_output(g)) os << ", peripheries=2";
    os << "];\n";
  }
  for (const Edge& e : c.edges()) os << "  g" << e.source << " -> g" << e.target << " [label=\"" << e.weight << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace projcx
