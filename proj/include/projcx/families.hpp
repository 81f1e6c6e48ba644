#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "projcx/embedder.hpp"
#include "projcx/equivalence.hpp"
#include "projcx/proj_space.hpp"

namespace projcx {

struct FamilyInstance {
  std::string family;
  std::vector<std::pair<std::string, std::uint64_t>> params;
  Circuit circuit;
  std::vector<std::size_t> ambient;  // projective dimension per block
  std::string semantics;
};

/// One JSON line: family, params, ambient, blocks, size, outputs, field,
/// semantics.
std::string family_metadata(const FamilyInstance& f);

/// Block x:(n+1); outputs x_1, ..., x_n through n unary sum gates, so the zero
/// set is the single point [1:0:...:0].
FamilyInstance gen_point_family(std::size_t n, Field field = Field::rationals());

/// Degree-d monomials in n+1 variables in graded lexicographic order
/// (x0^d first).
std::vector<Monomial> monomials(std::size_t vars, std::uint32_t d);

/// sum_M a_M * M(x) over degree-d monomials M, blocks (x:(n+1), a:C(n+d,d)):
/// one product per monomial reading a_M and the x-variables with
/// multiplicity, and one sum. Bidegree (d, 1); size (d+2) C(n+d,d).
FamilyInstance gen_universal_poly(std::size_t n, std::uint32_t d, Field field = Field::rationals());

/// n+1 universal degree-d polynomials in x:(n+1), output i reading the i-th
/// slice of the coefficient block coeff:(C(n+d,d)(n+1)). Blocks (coeff, x).
FamilyInstance gen_resultant_incidence(std::uint32_t d, std::size_t n, Field field = Field::rationals());

/// Whether exists y with Phi'(x, y, t) = 0 over GF(q) for a controlled
/// circuit with blocks (x, y, t).
bool ucr_membership(const Circuit& phi_prime, const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& t, std::uint64_t q,
                    std::uint64_t budget = kDefaultPointBudget);

/// Same question for a layout too large to build, with t fixed to tau.
bool ucr_membership(const UniversalLayout& layout, const std::vector<std::uint64_t>& x, const ControlAssignment& tau, std::uint64_t q,
                    std::uint64_t budget = kDefaultPointBudget);

/// Reusable form of the above when many x share one tau.
class UcrOracle {
public:
  UcrOracle(const UniversalLayout& layout, const ControlAssignment& tau, std::uint64_t q);
  bool member(const std::vector<std::uint64_t>& x, std::uint64_t budget = kDefaultPointBudget) const;
  const Circuit& restricted() const noexcept { return restricted_.circuit; }

private:
  RestrictedCircuit restricted_;
  ModEvaluator eval_;
  std::size_t m_;
};

/// All 2x2 minors z_ij z_kl - z_il z_kj (i<k, j<l) of the (a+1) x (b+1)
/// matrix z, indexed row-major over block z.
Circuit segre_minors(std::size_t a, std::size_t b, Field field = Field::rationals());

/// Replaces x-variables of a t-guarded circuit with blocks (x:n, y:m, t:N)
/// by z_{ie} = x_i t_e. Each guarded product x_i * t_e becomes z_{ie}; in copy
/// j every other t_e becomes z_{je}. Blocks of the result: (z:nN, y:m).
/// Outputs: the Segre minors, then for each original output its n copies.
/// Throws not_t_guarded.
Circuit segre_transform(const Circuit& phi_prime);

/// Bijection {n >= 1, m >= 0} -> N along diagonals.
std::uint64_t pair_index(std::uint64_t n, std::uint64_t m);
std::pair<std::uint64_t, std::uint64_t> unpair(std::uint64_t k);

}  // namespace projcx
