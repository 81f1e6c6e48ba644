#include "projcx/proj_space.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <thread>

namespace projcx {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

// canonical vectors of length k: q^{k-1} + ... + q + 1
std::uint64_t component_count(std::size_t k, std::uint64_t q) {
  std::uint64_t total = 0, power = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total = sat_add(total, power);
    power = sat_mul(power, q);
  }
  return total;
}

// Canonical vectors of length k in lexicographic order.
bool for_each_canonical(std::size_t k, std::uint64_t q, const std::function<bool(const std::vector<std::uint64_t>&)>& fn) {
  std::vector<std::uint64_t> v(k, 0);
  for (std::size_t lead = k; lead-- > 0;) {
    std::fill(v.begin(), v.end(), 0);
    v[lead] = 1;
    while (true) {
      if (!fn(v)) return false;
      std::size_t i = k;
      while (i > lead + 1 && v[i - 1] == q - 1) v[--i] = 0;
      if (i == lead + 1) break;
      ++v[i - 1];
    }
  }
  return true;
}

std::vector<std::uint64_t> canonical_at(std::size_t k, std::uint64_t q, std::uint64_t index) {
  std::vector<std::uint64_t> v(k, 0);
  std::uint64_t count = 1;
  for (std::size_t lead = k; lead-- > 0;) {
    if (index < count) {
      v[lead] = 1;
      for (std::size_t i = k; i-- > lead + 1;) {
        v[i] = index % q;
        index /= q;
      }
      return v;
    }
    index -= count;
    count = sat_mul(count, q);
  }
  throw Error(ErrorKind::bad_parameters, "point index out of range");
}

void require_prime(std::uint64_t q) {
  if (!is_prime(q)) throw Error(ErrorKind::bad_parameters, "q = " + std::to_string(q) + " is not prime");
}

std::string format_ambient(const Ambient& a) {
  std::string s;
  for (std::size_t i = 0; i < a.dims.size(); ++i) s += (i ? "," : "") + std::to_string(a.dims[i]);
  return s;
}

}  // namespace

bool canonicalize(std::vector<std::uint64_t>& v, std::uint64_t q) {
  auto it = std::find_if(v.begin(), v.end(), [](std::uint64_t x) { return x != 0; });
  if (it == v.end()) return false;
  if (*it != 1) {
    const std::uint64_t inv = inv_mod(*it, q);
    for (auto& x : v) x = mul_mod(x, inv, q);
  }
  return true;
}

std::uint64_t point_count(const Ambient& a) {
  std::uint64_t total = 1;
  for (std::size_t d : a.dims) total = sat_mul(total, component_count(d + 1, a.q));
  return total;
}

Ambient ambient_of(const BlockSpec& blocks, std::uint64_t q) {
  Ambient a{{}, q};
  for (std::size_t i = 0; i < blocks.count(); ++i) {
    if (blocks.size_of(i) == 0) throw Error(ErrorKind::bad_parameters, "block '" + blocks[i].name + "' is empty and has no projective space");
    a.dims.push_back(blocks.size_of(i) - 1);
  }
  return a;
}

void for_each_point(const Ambient& a, const std::function<bool(const ProjPoint&)>& fn, std::uint64_t budget) {
  require_prime(a.q);
  const std::uint64_t total = point_count(a);
  if (total > budget) {
    throw Error(ErrorKind::budget_exceeded, "ambient " + format_ambient(a) + " over F_" + std::to_string(a.q) + " has " +
                                                (total == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64") : std::to_string(total)) +
                                                " points, budget " + std::to_string(budget));
  }
  ProjPoint p;
  p.coords.resize(a.dims.size());
  std::function<bool(std::size_t)> rec = [&](std::size_t comp) -> bool {
    if (comp == a.dims.size()) return fn(p);
    return for_each_canonical(a.dims[comp] + 1, a.q, [&](const std::vector<std::uint64_t>& v) {
      p.coords[comp] = v;
      return rec(comp + 1);
    });
  };
  rec(0);
}

ProjPoint point_at(const Ambient& a, std::uint64_t index) {
  ProjPoint p;
  p.coords.resize(a.dims.size());
  for (std::size_t comp = a.dims.size(); comp-- > 0;) {
    const std::uint64_t count = component_count(a.dims[comp] + 1, a.q);
    p.coords[comp] = canonical_at(a.dims[comp] + 1, a.q, index % count);
    index /= count;
  }
  if (index != 0) throw Error(ErrorKind::bad_parameters, "point index out of range");
  return p;
}

PointSet::PointSet(Ambient ambient, std::vector<ProjPoint> points) : ambient_(std::move(ambient)), points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
}

bool PointSet::contains(const ProjPoint& p) const { return std::binary_search(points_.begin(), points_.end(), p); }

std::string format_point(const ProjPoint& p) {
  std::string s;
  for (std::size_t c = 0; c < p.coords.size(); ++c) {
    if (c) s += 'x';
    s += '[';
    for (std::size_t i = 0; i < p.coords[c].size(); ++i) s += (i ? ":" : "") + std::to_string(p.coords[c][i]);
    s += ']';
  }
  return s;
}

ProjPoint parse_point(std::string_view text, std::uint64_t q) {
  ProjPoint p;
  std::size_t i = 0;
  auto bad = [&] { return Error(ErrorKind::syntax_error, "bad point '" + std::string(text) + "'"); };
  while (i < text.size()) {
    if (text[i] != '[') throw bad();
    const std::size_t close = text.find(']', i);
    if (close == std::string_view::npos) throw bad();
    std::vector<std::uint64_t> v;
    std::string_view body = text.substr(i + 1, close - i - 1);
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t colon = std::min(body.find(':', start), body.size());
      const std::string part(body.substr(start, colon - start));
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) throw bad();
      v.push_back(std::stoull(part) % q);
      start = colon + 1;
    }
    if (!canonicalize(v, q)) throw Error(ErrorKind::bad_parameters, "zero vector in point '" + std::string(text) + "'");
    p.coords.push_back(std::move(v));
    i = close + 1;
    if (i < text.size()) {
      if (text[i] != 'x') throw bad();
      ++i;
    }
  }
  if (p.coords.empty()) throw bad();
  return p;
}

std::string serialize_point_set(const PointSet& s) {
  std::ostringstream os;
  os << "ambient " << format_ambient(s.ambient()) << " field " << s.ambient().q << '\n';
  for (const auto& p : s.points()) os << format_point(p) << '\n';
  return os.str();
}

PointSet parse_point_set(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line, word, dims, field_word;
  if (!std::getline(in, line)) throw Error(ErrorKind::syntax_error, "empty point set");
  std::istringstream head(line);
  Ambient a;
  if (!(head >> word >> dims >> field_word >> a.q) || word != "ambient" || field_word != "field") {
    throw Error(ErrorKind::syntax_error, "point set header must be 'ambient <dims> field <q>'");
  }
  require_prime(a.q);
  std::istringstream ds(dims);
  std::string d;
  while (std::getline(ds, d, ',')) a.dims.push_back(std::stoull(d));
  std::vector<ProjPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ProjPoint p = parse_point(line, a.q);
    if (p.coords.size() != a.dims.size()) throw Error(ErrorKind::shape_mismatch, "point " + line + " does not fit the ambient");
    for (std::size_t c = 0; c < a.dims.size(); ++c) {
      if (p.coords[c].size() != a.dims[c] + 1) throw Error(ErrorKind::shape_mismatch, "point " + line + " does not fit the ambient");
    }
    points.push_back(std::move(p));
  }
  return PointSet(std::move(a), std::move(points));
}

PointSet enumerate(const Ambient& a, std::uint64_t budget) {
  std::vector<ProjPoint> points;
  for_each_point(
      a, [&](const ProjPoint& p) {
        points.push_back(p);
        return true;
      },
      budget);
  return PointSet(a, std::move(points));
}

PointSet zero_set(const Circuit& c, std::uint64_t q, std::uint64_t budget, unsigned threads) {
  const Ambient a = ambient_of(c.blocks(), q);
  require_prime(q);
  const std::uint64_t total = point_count(a);
  if (total > budget) {
    throw Error(ErrorKind::budget_exceeded, "zero set over ambient " + format_ambient(a) + " needs " + std::to_string(total) + " points, budget " +
                                                std::to_string(budget));
  }
  const ModEvaluator eval(c, q);
  threads = std::max(1u, threads);
  std::vector<std::vector<ProjPoint>> found(threads);
  auto work = [&](unsigned w) {
    const std::uint64_t lo = total * w / threads, hi = total * (w + 1) / threads;
    for (std::uint64_t i = lo; i < hi; ++i) {
      ProjPoint p = point_at(a, i);
      if (eval.all_outputs_vanish(p.coords)) found[w].push_back(std::move(p));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<ProjPoint> all;
  for (auto& f : found) std::move(f.begin(), f.end(), std::back_inserter(all));
  return PointSet(a, std::move(all));
}

PointSet project(const PointSet& s, const std::vector<std::size_t>& keep) {
  Ambient a{{}, s.ambient().q};
  for (std::size_t k : keep) {
    if (k >= s.ambient().dims.size()) throw Error(ErrorKind::bad_parameters, "no component " + std::to_string(k));
    a.dims.push_back(s.ambient().dims[k]);
  }
  std::vector<ProjPoint> image;
  image.reserve(s.size());
  for (const auto& p : s.points()) {
    ProjPoint r;
    for (std::size_t k : keep) r.coords.push_back(p.coords[k]);
    image.push_back(std::move(r));
  }
  return PointSet(std::move(a), std::move(image));
}

ProjPoint segre(const ProjPoint& p, std::uint64_t q) {
  if (p.coords.size() != 2) throw Error(ErrorKind::shape_mismatch, "segre needs a point with two components");
  std::vector<std::uint64_t> z;
  z.reserve(p.coords[0].size() * p.coords[1].size());
  for (std::uint64_t x : p.coords[0]) {
    for (std::uint64_t t : p.coords[1]) z.push_back(mul_mod(x, t, q));
  }
  if (!canonicalize(z, q)) throw Error(ErrorKind::bad_parameters, "segre of a zero vector");
  return ProjPoint{{std::move(z)}};
}

std::optional<std::vector<std::uint64_t>> apply_component(const PLinearMap& m, std::size_t component, const ProjPoint& p, std::uint64_t q) {
  const Field f = Field::prime(q);
  std::vector<std::uint64_t> out;
  if (const auto* lin = std::get_if<LinearPart>(&m.component(component))) {
    const auto& x = p.coords.at(lin->source);
    out.assign(lin->matrix.size(), 0);
    for (std::size_t i = 0; i < lin->matrix.size(); ++i) {
      const auto& row = lin->matrix[i];
      if (row.size() != x.size()) throw Error(ErrorKind::shape_mismatch, "point does not fit the map's source");
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (x[j] != 0 && !row[j].is_zero()) acc = add_mod(acc, mul_mod(convert(row[j], f).residue(), x[j], q), q);
      }
      out[i] = acc;
    }
  } else {
    const auto& point = std::get<ConstantPart>(m.component(component)).point;
    out.assign(point.length(), 0);
    for (const auto& [i, v] : point.nonzeros()) out[i] = convert(v, f).residue();
  }
  if (!canonicalize(out, q)) return std::nullopt;
  return out;
}

std::optional<ProjPoint> apply_plinear(const PLinearMap& m, const ProjPoint& p, std::uint64_t q) {
  if (p.coords.size() != m.source().count()) throw Error(ErrorKind::shape_mismatch, "point has the wrong number of components");
  ProjPoint out;
  for (std::size_t c = 0; c < m.target().count(); ++c) {
    auto v = apply_component(m, c, p, q);
    if (!v) return std::nullopt;
    out.coords.push_back(std::move(*v));
  }
  return out;
}

PointSet pullback(const PLinearMap& m, const std::function<bool(const ProjPoint&)>& member, std::uint64_t q, std::uint64_t budget) {
  const Ambient a = ambient_of(m.source(), q);
  std::vector<ProjPoint> points;
  for_each_point(
      a,
      [&](const ProjPoint& p) {
        const auto image = apply_plinear(m, p, q);
        if (image && member(*image)) points.push_back(p);
        return true;
      },
      budget);
  return PointSet(a, std::move(points));
}

std::optional<std::vector<std::uint64_t>> find_witness(const ModEvaluator& eval, RawAssignment point, std::size_t search_block, std::size_t block_size,
                                                       std::uint64_t budget) {
  const std::uint64_t q = eval.modulus();
  if (search_block >= point.size()) throw Error(ErrorKind::bad_parameters, "no block " + std::to_string(search_block));
  if (block_size == 0) {
    point[search_block].clear();
    if (eval.all_outputs_vanish(point)) return std::vector<std::uint64_t>{};
    return std::nullopt;
  }
  const std::uint64_t count = component_count(block_size, q);
  if (count > budget) {
    throw Error(ErrorKind::budget_exceeded, "witness search over P^" + std::to_string(block_size - 1) + "(F_" + std::to_string(q) + ") needs " +
                                                std::to_string(count) + " points, budget " + std::to_string(budget));
  }
  std::optional<std::vector<std::uint64_t>> witness;
  for_each_canonical(block_size, q, [&](const std::vector<std::uint64_t>& v) {
    point[search_block] = v;
    if (eval.all_outputs_vanish(point)) {
      witness = v;
      return false;
    }
    return true;
  });
  return witness;
}

bool exists_witness(const ModEvaluator& eval, RawAssignment point, std::size_t search_block, std::size_t block_size, std::uint64_t budget) {
  return find_witness(eval, std::move(point), search_block, block_size, budget).has_value();
}

bool exists_witness(const Circuit& c, const RawAssignment& fixed, std::size_t search_block, std::uint64_t q, std::uint64_t budget) {
  require_prime(q);
  if (fixed.size() != c.blocks().count()) throw Error(ErrorKind::length_mismatch, "fixed assignment has the wrong number of blocks");
  const ModEvaluator eval(c, q);
  return exists_witness(eval, fixed, search_block, c.blocks().size_of(search_block), budget);
}

}  // namespace projcx
