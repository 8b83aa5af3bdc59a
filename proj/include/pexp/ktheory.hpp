#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pexp/fan.hpp"
#include "pexp/laurent.hpp"
#include "pexp/pexp.hpp"

namespace pexp {

// Sign applied to the dual basis when forming tangent weights. +1 is the
// convention under which a Cartier class with local characters m_σ has
// χ_T = Σ e^m over the lattice points of its polytope.
inline constexpr int kDefaultEpsilon = 1;

struct LocalizationOptions {
  int epsilon = kDefaultEpsilon;
  ResolveOptions resolve;
  // Which of the valid strict-transform cones to use in a pairing, counted
  // in lexicographic order (modulo the number of candidates).
  std::size_t strict_transform_choice = 0;
};

// ε times the dual basis of a smooth full-dimensional cone's generators.
std::vector<Character> tangent_weights(const Cone& sigma, int epsilon = kDefaultEpsilon);

// Restrictions of a class to the fixed points of a smooth complete toric
// variety, indexed like the fan's maximal cones.
struct FixedPointData {
  std::vector<std::vector<Character>> tangent_weights;
  std::vector<LaurentPoly> numerators;
};

FixedPointData fixed_point_data(const Fan& fan, std::vector<LaurentPoly> numerators, int epsilon = kDefaultEpsilon);

// [O_{V(τ)}] at each fixed point: the Koszul product Π (1 - e^{w_i}) over
// the weights dual to the generators of σ lying in τ, and 0 when σ ⊉ τ.
FixedPointData orbit_closure_class(const Fan& fan, const RaySet& tau, int epsilon = kDefaultEpsilon);

// Σ_σ numerator_σ / Π_i (1 - e^{w_{σ,i}}), reduced to Z[M].
LaurentPoly euler_characteristic(const Fan& fan, const FixedPointData& data);

// Holds one resolution of a complete fan and answers Euler characteristics
// and pairings against it. Immutable after construction.
class Localizer {
 public:
  explicit Localizer(FanPtr fan, LocalizationOptions options = {});
  // Uses the given smooth refinement instead of computing one; the resolve
  // field of the options is ignored.
  Localizer(SubdivisionMap resolution, LocalizationOptions options = {});

  const FanPtr& fan() const { return fan_; }
  const SubdivisionMap& resolution() const { return resolution_; }
  const LocalizationOptions& options() const { return options_; }

  LaurentPoly chi(const PExpFun& f) const;
  // ⟨f, [O_{V(τ)}]⟩ computed on the resolution.
  LaurentPoly pair(const PExpFun& f, const RaySet& tau) const;
  // Cones of the resolution with the span of τ and contained in τ, in
  // lexicographic order.
  std::vector<RaySet> strict_transform_candidates(const RaySet& tau) const;

 private:
  void cache_weights();

  FanPtr fan_;
  LocalizationOptions options_;
  SubdivisionMap resolution_;
  std::vector<std::vector<Character>> weights_;
};

LaurentPoly chi(const PExpFun& f, const LocalizationOptions& options = {});
LaurentPoly kronecker_pair(const PExpFun& f, const RaySet& tau, const LocalizationOptions& options = {});

struct PairingMatrix {
  std::vector<std::string> row_labels;
  std::vector<RaySet> columns;
  std::vector<std::vector<LaurentPoly>> entries;  // entries[i][j] = ⟨f_i, [O_{V(τ_j)}]⟩
};

PairingMatrix gram_matrix(FanPtr fan, const std::vector<PExpFun>& functions, const std::vector<RaySet>& taus,
                          const LocalizationOptions& options = {});

using LaurentMatrix = std::vector<std::vector<LaurentPoly>>;

// Fraction-free (Bareiss) determinant over Z[M].
LaurentPoly determinant(const LaurentMatrix& m, std::size_t rank);
// True when det is ±e^u.
bool is_unit(const LaurentPoly& p);

// Coefficients c_i in Z[M] with f = Σ c_i basis_i.
std::vector<LaurentPoly> decompose(const PExpFun& f, const std::vector<PExpFun>& basis);

// Functions g_j = Σ_i (G^{-1})_{ji} spanning_i whose Gram matrix against
// taus is the identity.
std::vector<PExpFun> dual_basis_solve(FanPtr fan, const std::vector<RaySet>& taus, const std::vector<PExpFun>& spanning,
                                      const LocalizationOptions& options = {});

}  // namespace pexp
