#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "projcx/equivalence.hpp"
#include "projcx/normal_form.hpp"
#include "projcx/slp.hpp"
#include "projcx/universal.hpp"
#include "support/fuzz.hpp"

namespace projcx {
namespace {

const Field kQ = Field::rationals();

bool lists(const ConditionResult& r, std::size_t id) { return std::find(r.offenders.begin(), r.offenders.end(), id) != r.offenders.end(); }

Circuit cubic() {
  return parse_slp("blocks x:3\nfield q\na = input x 0\nb = input x 1\nc = input x 2\np = prod a b c\noutputs p\n");
}

TEST(Checker, FanInThreeProduct) {
  const Circuit c = cubic();
  const NormalFormReport r = check_normal_form(c);
  EXPECT_FALSE(r[NfCondition::product_fan_in_two].pass);
  GateId prod = 0;
  for (GateId g = 0; g < c.gate_count(); ++g)
    if (c.gate(g).kind == GateKind::product) prod = g;
  EXPECT_TRUE(lists(r[NfCondition::product_fan_in_two], prod));
  EXPECT_FALSE(r.all_pass());
}

TEST(Checker, LeafIntoProduct) {
  const Circuit c = parse_slp("blocks x:2\nfield q\na = input x 0\nb = input x 1\np = prod a b\ns = sum p\noutputs s\n");
  const NormalFormReport r = check_normal_form(c);
  EXPECT_FALSE(r[NfCondition::leaf_edges_to_sums].pass);
  EXPECT_EQ(r[NfCondition::leaf_edges_to_sums].offenders.size(), 2u);
  EXPECT_TRUE(r[NfCondition::outputs_are_sums].pass);
  EXPECT_TRUE(r[NfCondition::product_fan_in_two].pass);
}

TEST(Checker, OutputProductAndSharedSum) {
  const Circuit c = parse_slp(
      "blocks x:2\nfield q\na = input x 0\nb = input x 1\nu = sum a\nv = sum b\np = prod u v\nw = prod u u\nr = sum p w\noutputs r p\n");
  const NormalFormReport r = check_normal_form(c);
  EXPECT_FALSE(r[NfCondition::outputs_are_sums].pass);
  EXPECT_FALSE(r[NfCondition::sum_fan_out_one].pass);
  EXPECT_TRUE(r[NfCondition::alternating].pass);
}

TEST(Checker, SumIntoSumBreaksAlternation) {
  const Circuit c = parse_slp("blocks x:1\nfield q\na = input x 0\nu = sum a\nv = sum u\noutputs v\n");
  const NormalFormReport r = check_normal_form(c);
  EXPECT_FALSE(r[NfCondition::alternating].pass);
  EXPECT_EQ(r[NfCondition::alternating].offenders.size(), 1u);
}

TEST(Checker, UniversalPasses) {
  for (auto [n, m, r1, r2, s] : {std::tuple{1, 0, 1, 0, 1}, {2, 1, 1, 1, 4}, {2, 2, 2, 1, 5}, {1, 1, 2, 2, 3}, {3, 0, 3, 0, 4}}) {
    const auto [phi, layout] = build_universal(n, m, r1, r2, s);
    EXPECT_TRUE(check_normal_form(phi).all_pass()) << check_normal_form(phi).describe();
  }
}

TEST(Normalize, CubicProduct) {
  const Circuit c = cubic();
  const Circuit nf = normalize(c);
  EXPECT_TRUE(check_normal_form(nf).all_pass());
  // leaves -> 3 unary sums -> prod -> unary sum -> prod -> output sum
  std::size_t sums = 0, prods = 0;
  for (const Gate& g : nf.gates()) {
    sums += g.kind == GateKind::sum;
    prods += g.kind == GateKind::product;
  }
  EXPECT_EQ(prods, 2u);
  EXPECT_EQ(sums, 5u);
  EXPECT_EQ(nf.gate(nf.outputs()[0]).kind, GateKind::sum);
  EXPECT_EQ(dense_expand(nf), dense_expand(c));
  EXPECT_TRUE(pit_equal(c, nf).equal);
}

TEST(Normalize, AlreadyNormal) {
  const auto [phi, layout] = build_universal(2, 1, 1, 1, 4);
  std::mt19937_64 rng(2);
  std::vector<FieldElem> w;
  for (std::size_t e = 0; e < phi.size(); ++e) w.emplace_back(kQ, static_cast<std::int64_t>(rng() % 7) - 3);
  const Circuit c = phi.with_weights(w);
  const Circuit nf = normalize(c);
  EXPECT_TRUE(check_normal_form(nf).all_pass());
  EXPECT_TRUE(pit_equal(c, nf).equal);
  EXPECT_LE(nf.size(), kNormalizeBlowup * c.size() + kNormalizeBlowup);
}

TEST(Normalize, WeightMigratesToSum) {
  const Circuit c = parse_slp("blocks x:2\nfield q\na = input x 0\nb = input x 1\np = prod 5*a b\ns = sum p\noutputs s\n");
  const Circuit nf = normalize(c);
  EXPECT_TRUE(check_normal_form(nf).all_pass());
  for (const Edge& e : nf.edges())
    if (nf.gate(e.target).kind == GateKind::product) {
      EXPECT_TRUE(e.weight.is_one());
    }
  const Assignment ones{{FieldElem(kQ, 1), FieldElem(kQ, 1)}};
  EXPECT_EQ(evaluate(nf, ones), evaluate(c, ones));
  EXPECT_EQ(evaluate(nf, ones)[0], FieldElem(kQ, 5));
}

TEST(Normalize, Errors) {
  const Circuit bad = parse_slp("blocks x:1 y:1\nfield q\na = input x 0\nb = input y 0\ns = sum a b\noutputs s\n");
  EXPECT_THROW(normalize(bad), Error);
}

TEST(Normalize, FuzzProperties) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 100; ++it) {
    const Circuit c = testing::random_homogeneous(rng);
    const Circuit nf = normalize(c);
    const NormalFormReport r = check_normal_form(nf);
    ASSERT_TRUE(r.all_pass()) << serialize_slp(c) << r.describe();
    EXPECT_LE(nf.size(), kNormalizeBlowup * c.size() + kNormalizeBlowup);
    EXPECT_EQ(validate(nf).output_degrees, validate(c).output_degrees);
    EXPECT_EQ(dense_expand(nf), dense_expand(c));
    EXPECT_EQ(serialize_slp(normalize(c)), serialize_slp(nf));  // deterministic
  }
}

}  // namespace
}  // namespace projcx
