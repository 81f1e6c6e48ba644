#include <gtest/gtest.h>

#include <set>

#include "projcx/proj_space.hpp"
#include "projcx/slp.hpp"

namespace projcx {
namespace {

const Field kQ = Field::rationals();

ProjPoint pt(std::vector<std::vector<std::uint64_t>> c) { return ProjPoint{std::move(c)}; }

Circuit det2() {
  return parse_slp(
      "blocks x:2 y:2\nfield q\na = input x 0\nb = input x 1\nc = input y 0\nd = input y 1\n"
      "p = prod a d\nr = prod b c\nf = sum p -1*r\noutputs f\n");
}

TEST(Enumerate, Counts) {
  EXPECT_EQ(enumerate(Ambient{{2}, 3}).size(), 13u);
  EXPECT_EQ(point_count(Ambient{{2}, 3}), 13u);
  EXPECT_EQ(enumerate(Ambient{{0}, 7}).size(), 1u);
  EXPECT_EQ(enumerate(Ambient{{1, 1}, 2}).size(), 9u);
  EXPECT_EQ(point_count(Ambient{{3}, 5}), 156u);
  EXPECT_EQ(point_count(Ambient{{200}, kMersenne31}), UINT64_MAX);
  EXPECT_THROW(enumerate(Ambient{{3}, 5}, 100), Error);
}

TEST(Enumerate, CanonicalSortedDistinct) {
  const Ambient a{{2, 1}, 3};
  const PointSet s = enumerate(a);
  EXPECT_EQ(s.size(), 13u * 4u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(point_at(a, i), s.points()[i]);
    if (i) {
      EXPECT_LT(s.points()[i - 1], s.points()[i]);
    }
    for (auto v : s.points()[i].coords) {
      const auto first = std::find_if(v.begin(), v.end(), [](auto x) { return x != 0; });
      ASSERT_NE(first, v.end());
      EXPECT_EQ(*first, 1u);
    }
  }
}

TEST(Canonicalize, Scales) {
  std::vector<std::uint64_t> v{0, 3, 1};
  EXPECT_TRUE(canonicalize(v, 5));
  EXPECT_EQ(v, (std::vector<std::uint64_t>{0, 1, 2}));
  std::vector<std::uint64_t> z{0, 0};
  EXPECT_FALSE(canonicalize(z, 5));
}

TEST(ZeroSet, Examples) {
  const Circuit x0 = parse_slp("blocks x:2\nfield q\na = input x 0\ns = sum a\noutputs s\n");
  EXPECT_EQ(zero_set(x0, 3).points(), (std::vector<ProjPoint>{pt({{0, 1}})}));

  const Circuit none = parse_slp("blocks x:3\nfield q\na = input x 0\ns = sum a\noutputs\n");
  EXPECT_EQ(zero_set(none, 3).size(), 13u);

  const PointSet diag = zero_set(det2(), 2);
  EXPECT_EQ(diag.points(), (std::vector<ProjPoint>{pt({{0, 1}, {0, 1}}), pt({{1, 0}, {1, 0}}), pt({{1, 1}, {1, 1}})}));
}

TEST(ZeroSet, ThreadIndependent) {
  const Circuit c = det2();
  EXPECT_EQ(zero_set(c, 5, kDefaultPointBudget, 1), zero_set(c, 5, kDefaultPointBudget, 4));
  EXPECT_EQ(zero_set(c, 5).size(), 6u);
}

TEST(Project, Examples) {
  const PointSet diag = zero_set(det2(), 2);
  EXPECT_EQ(project(diag, {0}), enumerate(Ambient{{1}, 2}));
  EXPECT_EQ(project(diag, {0, 1}), diag);
  EXPECT_TRUE(project(PointSet(Ambient{{1, 1}, 2}), {1}).empty());
  const PointSet swapped = project(diag, {1, 0});
  EXPECT_EQ(swapped.ambient().dims, (std::vector<std::size_t>{1, 1}));
}

TEST(Segre, Examples) {
  EXPECT_EQ(segre(pt({{1, 0}, {1, 0}}), 2), pt({{1, 0, 0, 0}}));
  EXPECT_EQ(segre(pt({{1, 1}, {1, 1}}), 2), pt({{1, 1, 1, 1}}));
  std::set<ProjPoint> image;
  for (const PointSet all = enumerate(Ambient{{1, 1}, 2}); const auto& p : all.points()) image.insert(segre(p, 2));
  EXPECT_EQ(image.size(), 9u);
  // row-major: z_{ij} = x_i t_j
  EXPECT_EQ(segre(pt({{1, 2, 0}, {1, 2}}), 3), pt({{1, 2, 2, 1, 0, 0}}));
}

PLinearMap example_map(Field f) {
  // ([x0:x1],[y0:y1]) -> ([y0+2y1 : y1], [3:5], [4x0 : x0+x1])
  auto e = [&](std::int64_t v) { return FieldElem(f, v); };
  SparseVector c(f, 2);
  c.set(0, e(3));
  c.set(1, e(5));
  return PLinearMap(BlockSpec({{"x", 2}, {"y", 2}}), BlockSpec({{"u", 2}, {"v", 2}, {"w", 2}}), f,
                    {LinearPart{1, {{e(1), e(2)}, {e(0), e(1)}}}, ConstantPart{c}, LinearPart{0, {{e(4), e(0)}, {e(1), e(1)}}}});
}

TEST(ApplyPlinear, ExampleMap) {
  // over Q the image is ([2:1],[3:5],[4:1]); compare in GF(101) after scaling
  const std::uint64_t q = 101;
  const auto img = apply_plinear(example_map(kQ), pt({{1, 0}, {0, 1}}), q);
  ASSERT_TRUE(img.has_value());
  auto canon = [&](std::vector<std::uint64_t> v) {
    canonicalize(v, q);
    return v;
  };
  EXPECT_EQ(img->coords[0], canon({2, 1}));
  EXPECT_EQ(img->coords[1], canon({3, 5}));
  EXPECT_EQ(img->coords[2], canon({4, 1}));
}

TEST(ApplyPlinear, IdentityAndKernel) {
  const Field f = Field::prime(5);
  const ProjPoint p = pt({{1, 3}, {0, 1}});
  EXPECT_EQ(apply_plinear(PLinearMap::identity(BlockSpec({{"x", 2}, {"y", 2}}), f), p, 5), p);
  const PLinearMap proj(BlockSpec({{"x", 2}}), BlockSpec({{"u", 1}}), f, {LinearPart{0, {{FieldElem(f, 1), FieldElem(f, 0)}}}});
  EXPECT_FALSE(apply_plinear(proj, pt({{0, 1}}), 5).has_value());
  EXPECT_TRUE(apply_plinear(proj, pt({{1, 1}}), 5).has_value());
}

TEST(Pullback, Examples) {
  const Circuit c = det2();
  const PointSet s = zero_set(c, 3);
  const PLinearMap id = PLinearMap::identity(c.blocks(), kQ);
  EXPECT_EQ(pullback(id, [&](const ProjPoint& p) { return s.contains(p); }, 3), s);
  EXPECT_TRUE(pullback(id, [](const ProjPoint&) { return false; }, 3).empty());
  // points outside the domain are never in the pullback
  const PLinearMap proj(BlockSpec({{"x", 2}}), BlockSpec({{"u", 1}}), kQ, {LinearPart{0, {{FieldElem(kQ, 1), FieldElem(kQ, 0)}}}});
  EXPECT_EQ(pullback(proj, [](const ProjPoint&) { return true; }, 3).size(), 3u);
}

TEST(Witness, Examples) {
  const Circuit xy = parse_slp("blocks x:2 y:2\nfield q\na = input x 0\nc = input y 0\np = prod a c\ns = sum p\noutputs s\n");
  EXPECT_TRUE(exists_witness(xy, RawAssignment{{0, 1}, {}}, 1, 3));
  const Circuit two = parse_slp("blocks x:2 y:2\nfield q\na = input x 0\nc = input y 0\nd = input y 1\np = prod a c\nr = prod a d\noutputs p r\n");
  EXPECT_FALSE(exists_witness(two, RawAssignment{{1, 0}, {}}, 1, 3));
  EXPECT_TRUE(exists_witness(two, RawAssignment{{0, 1}, {}}, 1, 3));
  for (const PointSet all = enumerate(Ambient{{1}, 3}); const auto& x : all.points()) {
    EXPECT_TRUE(exists_witness(det2(), RawAssignment{x.coords[0], {}}, 1, 3));
    const auto w = find_witness(ModEvaluator(det2(), 3), RawAssignment{x.coords[0], {0, 0}}, 1, 2);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(*w, x.coords[0]);
  }
}

TEST(Format, PointAndSetRoundTrip) {
  const ProjPoint p = pt({{1, 0}, {0, 1}});
  EXPECT_EQ(format_point(p), "[1:0]x[0:1]");
  EXPECT_EQ(parse_point("[1:0]x[0:1]", 2), p);
  EXPECT_EQ(parse_point("[2:4]", 5), pt({{1, 2}}));
  EXPECT_THROW(parse_point("[0:0]", 5), Error);
  const PointSet s = zero_set(det2(), 3);
  EXPECT_EQ(parse_point_set(serialize_point_set(s)), s);
  EXPECT_EQ(serialize_point_set(s).substr(0, 19), "ambient 1,1 field 3");
}

}  // namespace
}  // namespace projcx
