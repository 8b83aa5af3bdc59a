#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "pexp/lattice.hpp"

namespace pexp {

// A strongly convex rational polyhedral cone, stored by its extreme rays
// together with an H-description relative to its linear span.
class Cone {
 public:
  Cone() = default;

  // Generators must be nonzero, primitive and distinct, and each must span
  // an extreme ray. Non-simplicial cones are limited to ambient rank <= 4.
  static Cone from_generators(std::size_t rank, std::vector<LatticePoint> generators);
  // The cone spanned by arbitrary nonzero vectors, keeping only extreme rays.
  static Cone hull(std::size_t rank, const std::vector<LatticePoint>& vectors);

  std::size_t rank() const { return rank_; }
  std::size_t dim() const { return dim_; }
  const std::vector<LatticePoint>& generators() const { return generators_; }
  // Primitive characters nonnegative on the cone, one per facet, defined
  // modulo the equations.
  const std::vector<Character>& facet_normals() const { return facet_normals_; }
  // Generator indices lying on each facet (parallel to facet_normals).
  const std::vector<std::vector<std::size_t>>& facets() const { return facets_; }
  // Saturated basis of σ^⊥ ∩ M.
  const std::vector<Character>& equations() const { return equations_; }
  // Saturated basis of N_σ = span(σ) ∩ N.
  const std::vector<LatticePoint>& span_basis() const { return span_basis_; }

  bool is_simplicial() const { return generators_.size() == dim_; }
  bool contains(const LatticePoint& v) const;
  bool relative_interior_contains(const LatticePoint& v) const;
  // All faces as sorted generator-index sets, including {} and the cone.
  std::vector<std::vector<std::size_t>> faces() const;

  // Index of the lattice spanned by the generators in N_σ. Simplicial only.
  Integer multiplicity() const;
  bool is_smooth() const { return is_simplicial() && multiplicity() == 1; }

  // M_σ = M / (σ^⊥ ∩ M). Identity for full-dimensional cones; evaluation on
  // the generators for smooth cones; evaluation on span_basis otherwise.
  QuotientLattice character_quotient() const;

 private:
  void compute(bool prune);

  std::size_t rank_ = 0;
  std::size_t dim_ = 0;
  std::vector<LatticePoint> generators_;
  std::vector<Character> facet_normals_;
  std::vector<std::vector<std::size_t>> facets_;
  std::vector<Character> equations_;
  std::vector<LatticePoint> span_basis_;
  Integer index_ = 1;  // product of invariant factors of the generator matrix
};

// Sorted ray indices naming a cone of a fan.
using RaySet = std::vector<std::size_t>;

class Fan {
 public:
  Fan() = default;

  // Validates rays and the fan axiom, and computes the face lattice.
  static Fan build(std::size_t rank, std::vector<LatticePoint> rays, std::vector<RaySet> maximal_cones);

  std::size_t rank() const { return rank_; }
  const std::vector<LatticePoint>& rays() const { return rays_; }
  std::size_t num_maximal() const { return maximal_.size(); }
  const std::vector<RaySet>& maximal_cones() const { return maximal_; }
  const Cone& maximal_cone(std::size_t i) const { return cones_[maximal_index_[i]]; }
  std::size_t maximal_cone_id(std::size_t i) const { return maximal_index_[i]; }

  // Every cone of the fan, ordered by (dim, ray set).
  std::size_t num_cones() const { return cone_sets_.size(); }
  const RaySet& cone_set(std::size_t id) const { return cone_sets_[id]; }
  const Cone& cone(std::size_t id) const { return cones_[id]; }
  const QuotientLattice& quotient(std::size_t id) const { return quotients_[id]; }
  std::optional<std::size_t> find_cone(const RaySet& rays) const;
  // Like find_cone but throws ConeNotInFan.
  std::size_t cone_id(const RaySet& rays) const;

  std::optional<std::size_t> ray_index(const LatticePoint& v) const;
  // Maximal cones whose ray set contains `tau`.
  std::vector<std::size_t> maximal_cones_containing(const RaySet& tau) const;
  // Every maximal cone is full-dimensional and smooth.
  bool is_smooth() const;

  bool operator==(const Fan& o) const {
    return rank_ == o.rank_ && rays_ == o.rays_ && maximal_ == o.maximal_;
  }
  bool operator!=(const Fan& o) const { return !(*this == o); }

  // Skips the pairwise fan-axiom check; for fans produced by subdivision.
  static Fan assemble(std::size_t rank, std::vector<LatticePoint> rays, std::vector<RaySet> maximal_cones);

 private:
  std::size_t rank_ = 0;
  std::vector<LatticePoint> rays_;
  std::vector<RaySet> maximal_;
  std::vector<std::size_t> maximal_index_;
  std::vector<RaySet> cone_sets_;
  std::vector<Cone> cones_;
  std::vector<QuotientLattice> quotients_;
  std::map<RaySet, std::size_t> cone_lookup_;
  std::map<LatticePoint, std::size_t> ray_lookup_;
};

using FanPtr = std::shared_ptr<const Fan>;

// Extreme rays (primitive) of the intersection of two cones.
std::vector<LatticePoint> intersection_rays(const Cone& a, const Cone& b);

// Throws NotAFan when some pair of maximal cones meets in a non-face.
void check_fan_axiom(const Fan& fan);

Integer multiplicity(const Cone& c);
bool is_complete(const Fan& fan);

struct StarQuotient {
  Fan fan;                              // Δ_τ in N / N_τ
  IntMatrix projection;                 // N -> N / N_τ, rows span τ^⊥ ∩ M
  std::vector<std::size_t> source_cone;  // maximal cone of Δ lifting each maximal cone of Δ_τ
};

StarQuotient star_quotient(const Fan& fan, const RaySet& tau);

// A refinement: each maximal cone of `fine` lies in the assigned maximal cone
// of `coarse`.
struct SubdivisionMap {
  FanPtr fine;
  FanPtr coarse;
  std::vector<std::size_t> assignment;

  static SubdivisionMap identity(FanPtr fan);
};

// (fine -> mid) then (mid -> coarse)
SubdivisionMap compose(const SubdivisionMap& fine_to_mid, const SubdivisionMap& mid_to_coarse);

SubdivisionMap stellar_subdivision(FanPtr fan, const LatticePoint& ray);

struct ResolveOptions {
  // When set, pull order, cone choice and box point are drawn at random,
  // giving a different (still terminating) resolution per seed.
  std::optional<std::uint64_t> seed;
};

struct ResolutionStep {
  LatticePoint ray;
  bool simplicial_pass = false;  // pulling an existing ray
  std::vector<Integer> multiplicities_before;  // simplicial maximal cones only
  std::vector<Integer> multiplicities_after;
};

// Subdivides until every maximal cone is smooth. Each smoothing step checks
// that every new cone has strictly smaller multiplicity than the cone it
// replaces, which certifies termination.
SubdivisionMap resolve(FanPtr fan, const ResolveOptions& options = {}, std::vector<ResolutionStep>* trace = nullptr);

}  // namespace pexp
