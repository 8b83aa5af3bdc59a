#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pexp/error.hpp"
#include "pexp/fan.hpp"
#include "pexp/laurent.hpp"

namespace pexp {

// An integral piecewise exponential function on a fan: one exponential sum
// per maximal cone σ, written over M_σ = M / (σ^⊥ ∩ M), agreeing on common
// faces. Values on smaller cones are obtained by restriction.
class PExpFun {
 public:
  PExpFun() = default;

  const FanPtr& fan() const { return fan_; }
  const std::vector<LaurentPoly>& values() const { return values_; }
  const LaurentPoly& value(std::size_t maximal) const { return values_[maximal]; }

  static PExpFun constant(FanPtr fan, const LaurentPoly& global);
  static PExpFun one(FanPtr fan);

  friend PExpFun operator+(const PExpFun& a, const PExpFun& b);
  friend PExpFun operator-(const PExpFun& a, const PExpFun& b);
  friend PExpFun operator*(const PExpFun& a, const PExpFun& b);
  // R(T)-module action.
  friend PExpFun operator*(const LaurentPoly& c, const PExpFun& f);
  PExpFun operator-() const;

  friend bool operator==(const PExpFun& a, const PExpFun& b);
  friend bool operator!=(const PExpFun& a, const PExpFun& b) { return !(a == b); }

 private:
  friend struct PExpAccess;
  PExpFun(FanPtr fan, std::vector<LaurentPoly> values) : fan_(std::move(fan)), values_(std::move(values)) {}

  FanPtr fan_;
  std::vector<LaurentPoly> values_;
};

bool same_fan(const FanPtr& a, const FanPtr& b);

struct GkmViolation {
  std::size_t first;   // maximal cone indices
  std::size_t second;
  RaySet face;         // their common face
  LaurentPoly first_restricted;
  LaurentPoly second_restricted;
};

struct GkmReport {
  std::vector<GkmViolation> violations;
  std::optional<PExpFun> function;  // set exactly when there are no violations

  bool ok() const { return violations.empty(); }
};

// Checks every pair of maximal cones on their common face. Ranks must match
// the quotient lattices of the maximal cones (RankMismatch otherwise).
GkmReport gkm_validate(FanPtr fan, std::vector<LaurentPoly> values);
// Like gkm_validate, but throws GkmViolation naming the first bad face.
PExpFun make_pexp(FanPtr fan, std::vector<LaurentPoly> values);

// Value on the cone τ, written over M_τ.
LaurentPoly restrict(const PExpFun& f, const RaySet& tau);

struct CartierData {
  std::vector<Character> m;  // one per maximal cone
};

PExpFun from_cartier(FanPtr fan, const CartierData& data);

PExpFun pullback(const PExpFun& f, const SubdivisionMap& s);

// Raised by descend; names the coarse cone and two disagreeing fine values.
class NotDescendable : public Error {
 public:
  NotDescendable(std::size_t coarse_cone, std::size_t fine_a, std::size_t fine_b, LaurentPoly value_a,
                 LaurentPoly value_b, const std::string& what)
      : Error(ErrorKind::NotDescendable, what),
        coarse_cone(coarse_cone),
        fine_a(fine_a),
        fine_b(fine_b),
        value_a(std::move(value_a)),
        value_b(std::move(value_b)) {}

  std::size_t coarse_cone;
  std::size_t fine_a;
  std::size_t fine_b;
  LaurentPoly value_a;  // over M of the coarse cone
  LaurentPoly value_b;
};

PExpFun descend(const PExpFun& fine, const SubdivisionMap& s);

// Exponent map M_from -> M_to between two cones' quotient lattices, for
// `to` a face of `from` (or a cone with the same span).
IntMatrix quotient_map(const QuotientLattice& from, const QuotientLattice& to);

}  // namespace pexp
