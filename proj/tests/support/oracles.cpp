#include "oracles.hpp"

#include <set>

#include "projcx/families.hpp"
#include "projcx/slp.hpp"
#include "projcx/universal.hpp"

namespace projcx::testing {

std::vector<NamedCircuit> guarded_toys() {
  std::vector<NamedCircuit> out;
  out.push_back({"t0x0*y0", parse_slp("blocks x:2 y:1 t:1\nfield q\na = input x 0\nt = input t 0\ny = input y 0\n"
                                      "g = prod a t\nh = prod g y\nf = sum h\noutputs f\n")});
  out.push_back({"residual t", parse_slp("blocks x:2 y:1 t:2\nfield q\na = input x 0\nb = input x 1\nt0 = input t 0\nt1 = input t 1\ny = input y 0\n"
                                         "g0 = prod a t0\ng1 = prod b t1\nh0 = prod g0 t1 y\nh1 = prod g1 t0 y\nf = sum h0 h1\noutputs f\n")});
  out.push_back({"two outputs", parse_slp("blocks x:2 y:2 t:2\nfield q\na = input x 0\nb = input x 1\nt0 = input t 0\nt1 = input t 1\n"
                                          "y0 = input y 0\ny1 = input y 1\n"
                                          "g0 = prod a t0\ng1 = prod b t1\ng2 = prod a t1\nh0 = prod g0 y0\nh1 = prod g1 y1\nh2 = prod g2 y1\n"
                                          "f0 = sum h0 h1\nf1 = sum h2\noutputs f0 f1\n")});
  out.push_back({"controlled Phi(2,1,1,0,3)", controlize(build_universal(2, 1, 1, 0, 3).first).first});
  out.push_back({"controlled Phi(1,1,1,1,2)", controlize(build_universal(1, 1, 1, 1, 2).first).first});
  return out;
}

SegreSides segre_transform_sides(const Circuit& phi_prime, std::uint64_t q) {
  const Circuit tr = segre_transform(phi_prime);
  const std::size_t n = phi_prime.blocks().size_of(0), N = phi_prime.blocks().size_of(2);
  std::set<std::vector<std::uint64_t>> image;
  for_each_point(Ambient{{n - 1, N - 1}, q}, [&](const ProjPoint& p) {
    image.insert(segre(p, q).coords[0]);
    return true;
  });
  const PointSet zt = zero_set(tr, q);
  std::vector<ProjPoint> lhs;
  for (const auto& p : zt.points())
    if (image.contains(p.coords[0])) lhs.push_back(p);
  std::vector<ProjPoint> rhs;
  for (const PointSet all = zero_set(phi_prime, q); const auto& p : all.points()) {
    const ProjPoint z = segre(ProjPoint{{p.coords[0], p.coords[2]}}, q);
    rhs.push_back(ProjPoint{{z.coords[0], p.coords[1]}});
  }
  return {PointSet(zt.ambient(), std::move(lhs)), PointSet(zt.ambient(), std::move(rhs))};
}

}  // namespace projcx::testing
