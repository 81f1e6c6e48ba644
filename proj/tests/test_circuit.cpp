#include <gtest/gtest.h>

#include <random>

#include "projcx/equivalence.hpp"
#include "projcx/families.hpp"
#include "projcx/plinear.hpp"
#include "projcx/slp.hpp"
#include "projcx/universal.hpp"
#include "support/fuzz.hpp"

namespace projcx {
namespace {

const Field kQ = Field::rationals();

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::bad_parameters;
}

Assignment point_q(std::initializer_list<std::initializer_list<std::int64_t>> blocks) {
  Assignment a;
  for (auto b : blocks) {
    a.emplace_back();
    for (auto v : b) a.back().emplace_back(kQ, v);
  }
  return a;
}

TEST(Validate, ProductDegreeAndSize) {
  CircuitBuilder b(BlockSpec({{"x", 2}, {"y", 1}}), kQ);
  const GateId p = b.add_product();
  b.add_edge(b.leaf(0, 0), p, 1);
  b.add_edge(b.leaf(1, 0), p, 1);
  b.add_output(p);
  const ValidationReport r = validate(std::move(b).build());
  EXPECT_EQ(r.size, 2u);
  ASSERT_EQ(r.output_degrees.size(), 1u);
  EXPECT_EQ(r.output_degrees[0], (MultiDegree{1, 1}));
}

TEST(Validate, InhomogeneousSum) {
  CircuitBuilder b(BlockSpec({{"x", 2}, {"y", 1}}), kQ);
  const GateId s = b.add_sum();
  b.add_edge(b.leaf(0, 0), s, 1);
  b.add_edge(b.leaf(1, 0), s, 1);
  b.add_output(s);
  const Circuit c = std::move(b).build();
  EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::inhomogeneous_sum);
}

TEST(Validate, PointFamilySize) { EXPECT_EQ(validate(gen_point_family(3).circuit).size, 3u); }

TEST(Builder, StructuralErrors) {
  {
    CircuitBuilder b(BlockSpec({{"x", 1}}), kQ);
    const GateId s1 = b.add_sum(), s2 = b.add_sum();
    b.add_edge(s1, s2, 1);
    b.add_edge(s2, s1, 1);
    b.add_edge(b.leaf(0, 0), s1, 1);
    b.add_output(s1);
    EXPECT_EQ(kind_of([&] { std::move(b).build(); }), ErrorKind::cycle_detected);
  }
  {
    CircuitBuilder b(BlockSpec({{"x", 1}}), kQ);
    b.add_output(b.add_sum());
    EXPECT_EQ(kind_of([&] { std::move(b).build(); }), ErrorKind::malformed_gate);
  }
  EXPECT_EQ(kind_of([] { BlockSpec({{"x", 1}, {"x", 2}}); }), ErrorKind::bad_parameters);
}

TEST(Evaluate, LinearForm) {
  const Circuit c = parse_slp("blocks x:2\nfield q\ng0 = input x 0\ng1 = input x 1\ng2 = sum g0 2*g1\noutputs g2\n");
  const auto out = evaluate(c, point_q({{3, 1}}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], FieldElem(kQ, 5));
}

TEST(Evaluate, ShapeErrors) {
  const Circuit c = gen_point_family(2).circuit;
  EXPECT_EQ(kind_of([&] { evaluate(c, point_q({{1, 2}})); }), ErrorKind::length_mismatch);
  const Field f7 = Field::prime(7);
  Assignment wrong{{FieldElem(f7, 1), FieldElem(f7, 1), FieldElem(f7, 1)}};
  EXPECT_EQ(kind_of([&] { evaluate(c, wrong); }), ErrorKind::field_mismatch);
}

TEST(Evaluate, UniversalQuadricGF7) {
  const Field f7 = Field::prime(7);
  const Circuit c = gen_universal_poly(2, 2, f7).circuit;
  // oracle: coefficient table, then substitution by hand
  const auto dense = dense_expand(c);
  ASSERT_EQ(dense.size(), 1u);
  const std::vector<std::uint64_t> x{1, 1, 0};
  std::uint64_t expect = 0;
  for (const auto& [mono, coeff] : dense[0].terms) {
    std::uint64_t term = coeff.residue();
    for (std::size_t v = 0; v < 3; ++v)
      for (std::uint32_t e = 0; e < mono[v]; ++e) term = term * x[v] % 7;
    for (std::size_t v = 3; v < mono.size(); ++v)
      for (std::uint32_t e = 0; e < mono[v]; ++e) term = term * 1 % 7;
    expect = (expect + term) % 7;
  }
  EXPECT_EQ(expect, 3u);
  Assignment p{{FieldElem(f7, 1), FieldElem(f7, 1), FieldElem(f7, 0)}, {}};
  for (int i = 0; i < 6; ++i) p[1].emplace_back(f7, 1);
  EXPECT_EQ(evaluate(c, p)[0].residue(), expect);
}

TEST(Evaluate, ZeroAndScaling) {
  std::mt19937_64 rng(11);
  const Field f = Field::prime(kMersenne31);
  for (int it = 0; it < 40; ++it) {
    const Circuit c = convert_field(testing::random_homogeneous(rng), f);
    const ValidationReport rep = validate(c);
    Assignment zero, p, scaled;
    const FieldElem lambda(f, 12345);
    for (std::size_t b = 0; b < c.blocks().count(); ++b) {
      zero.emplace_back(c.blocks().size_of(b), FieldElem::zero(f));
      p.emplace_back();
      scaled.emplace_back();
      for (std::size_t i = 0; i < c.blocks().size_of(b); ++i) {
        p.back().push_back(sample_uniform(f, rng()));
        scaled.back().push_back(b == 0 ? p.back().back() * lambda : p.back().back());
      }
    }
    const auto z = evaluate(c, zero), v = evaluate(c, p), w = evaluate(c, scaled);
    for (std::size_t o = 0; o < z.size(); ++o) {
      EXPECT_TRUE(z[o].is_zero());
      FieldElem factor = FieldElem::one(f);
      for (std::uint32_t e = 0; e < rep.output_degrees[o][0]; ++e) factor *= lambda;
      EXPECT_EQ(w[o], v[o] * factor);
    }
    ModEvaluator fast(c, kMersenne31);
    RawAssignment raw;
    for (const auto& blk : p) {
      raw.emplace_back();
      for (const auto& e : blk) raw.back().push_back(e.residue());
    }
    const auto fv = fast.evaluate(raw);
    for (std::size_t o = 0; o < v.size(); ++o) EXPECT_EQ(fv[o], v[o].residue());
  }
}

TEST(ComposePlinear, IdentityIsPitEqual) {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 20; ++it) {
    const Circuit c = testing::random_homogeneous(rng);
    const Circuit d = compose_plinear(c, PLinearMap::identity(c.blocks(), c.field()));
    EXPECT_TRUE(pit_equal(c, d).equal);
  }
}

TEST(ComposePlinear, LinearAndConstantComponents) {
  // f = x0*y0 + x1*y1 over (x:2, y:2)
  const Circuit c = parse_slp(
      "blocks x:2 y:2\nfield q\n"
      "a = input x 0\nb = input x 1\nc = input y 0\nd = input y 1\n"
      "p = prod a c\nq = prod b d\nf = sum p q\noutputs f\n");
  // x := [u0 + u1, 2 u1], y := [3, 5]
  std::vector<std::vector<FieldElem>> mat{{FieldElem(kQ, 1), FieldElem(kQ, 1)}, {FieldElem(kQ, 0), FieldElem(kQ, 2)}};
  SparseVector cst(kQ, 2);
  cst.set(0, FieldElem(kQ, 3));
  cst.set(1, FieldElem(kQ, 5));
  const PLinearMap m(BlockSpec({{"u", 2}}), c.blocks(), kQ, {LinearPart{0, mat}, ConstantPart{cst}});
  const Circuit r = compose_plinear(c, m);
  EXPECT_EQ(r.blocks().count(), 1u);
  for (const Gate& g : r.gates())
    if (g.kind == GateKind::input) {
      EXPECT_EQ(g.block, 0u);
    }
  // 3(u0 + u1) + 10 u1 at u = (2, 7): 27 + 70
  EXPECT_EQ(evaluate(r, point_q({{2, 7}}))[0], FieldElem(kQ, 97));
  EXPECT_EQ(kind_of([&] { compose_plinear(gen_point_family(2).circuit, m); }), ErrorKind::shape_mismatch);
}

TEST(Prune, IsolatedGateRemoved) {
  CircuitBuilder b(BlockSpec({{"x", 2}}), kQ);
  const GateId s = b.add_sum();
  b.add_edge(b.leaf(0, 0), s, 1);
  const GateId dead = b.add_sum();
  b.add_edge(b.leaf(0, 1), dead, 1);
  b.add_output(s);
  const Circuit c = std::move(b).build();
  const Circuit p = prune_dead(c);
  EXPECT_EQ(p.gate_count(), 2u);
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(evaluate(p, point_q({{4, 9}})), evaluate(c, point_q({{4, 9}})));
}

TEST(Prune, LeanCircuitIsFixedPoint) {
  const Circuit c = gen_universal_poly(2, 2).circuit;
  EXPECT_EQ(serialize_slp(prune_dead(c)), serialize_slp(c));
}

TEST(Prune, UniversalHasDeadSums) {
  const auto [phi, layout] = build_universal(2, 1, 1, 1, 4);
  EXPECT_LT(prune_dead(phi).size(), phi.size());
}

TEST(Slp, RoundTrip) {
  const Circuit c = gen_point_family(2).circuit;
  const std::string text = serialize_slp(c);
  const Circuit d = parse_slp(text);
  EXPECT_EQ(serialize_slp(d), text);
  EXPECT_EQ(d.blocks(), c.blocks());
  EXPECT_EQ(d.gate_count(), c.gate_count());
  EXPECT_EQ(d.size(), c.size());
  EXPECT_TRUE(pit_equal(c, d).equal);
}

TEST(Slp, UnknownGateRef) {
  EXPECT_EQ(kind_of([] { parse_slp("blocks x:1\nfield q\ng0 = input x 0\ng1 = sum g0 g7\noutputs g1\n"); }), ErrorKind::unknown_gate_ref);
  EXPECT_EQ(kind_of([] { parse_slp("blocks x:1\nfield q\ng0 = input x 0\ng0 = sum g0\noutputs g0\n"); }), ErrorKind::duplicate_id);
  EXPECT_EQ(kind_of([] { parse_slp("blocks x:1\nfield q\ng0 = frobnicate\n"); }), ErrorKind::syntax_error);
}

TEST(Slp, WeightCanonicalized) {
  const Circuit c = parse_slp("blocks x:1\nfield gf 7\ng0 = input x 0\ng1 = sum 9*g0\noutputs g1\n");
  EXPECT_EQ(c.edge(0).weight.residue(), 2u);
}

TEST(Slp, ConstantsFoldIntoWeights) {
  const Circuit c = parse_slp("blocks x:1\nfield q\nk = const 3\ng0 = input x 0\ng1 = prod k g0 g0\ng2 = sum 2*g1\noutputs g2\n");
  EXPECT_EQ(evaluate(c, point_q({{5}}))[0], FieldElem(kQ, 150));
}

TEST(Slp, FuzzRoundTrip) {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 50; ++it) {
    const Circuit c = testing::random_homogeneous(rng);
    const Circuit d = parse_slp(serialize_slp(c));
    EXPECT_EQ(serialize_slp(d), serialize_slp(c));
  }
}

TEST(Dot, MentionsEveryGate) {
  const Circuit c = gen_point_family(2).circuit;
  const std::string dot = export_dot(c);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  for (GateId g = 0; g < c.gate_count(); ++g) EXPECT_NE(dot.find("g" + std::to_string(g)), std::string::npos);
}

TEST(WithWeights, ReplacesAll) {
  const Circuit c = gen_point_family(2).circuit;
  const std::vector<FieldElem> w(c.size(), FieldElem(kQ, 4));
  const Circuit d = c.with_weights(w);
  EXPECT_EQ(evaluate(d, point_q({{1, 2, 3}})), (std::vector<FieldElem>{FieldElem(kQ, 8), FieldElem(kQ, 12)}));
  EXPECT_THROW(c.with_weights(std::vector<FieldElem>(1, FieldElem(kQ, 1))), Error);
}

}  // namespace
}  // namespace projcx
