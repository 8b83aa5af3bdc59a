#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pexp/integer.hpp"
#include "pexp/lattice.hpp"

namespace pexp {

// An element of Z[M] ≅ R(T): a finite sum Σ a_u e^u with nonzero integer
// coefficients. Terms are kept in lexicographic exponent order.
class LaurentPoly {
 public:
  using Terms = std::map<Character, Integer>;

  explicit LaurentPoly(std::size_t rank = 0) : rank_(rank) {}

  static LaurentPoly constant(std::size_t rank, const Integer& c);
  static LaurentPoly monomial(const Character& u, const Integer& c = 1);
  // 1 - e^w
  static LaurentPoly one_minus(const Character& w);
  // Rejects zero coefficients, duplicate exponents and rank mismatches.
  static LaurentPoly from_terms(std::size_t rank, const std::vector<std::pair<Character, Integer>>& terms);

  std::size_t rank() const { return rank_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  Integer coefficient(const Character& u) const;
  // If this is ±e^u, returns u.
  std::optional<Character> as_unit() const;
  std::optional<Integer> as_constant() const;

  LaurentPoly& operator+=(const LaurentPoly& rhs);
  LaurentPoly& operator-=(const LaurentPoly& rhs);
  LaurentPoly& operator*=(const LaurentPoly& rhs);
  LaurentPoly& operator*=(const Integer& k);
  LaurentPoly operator-() const;
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.rank_ == b.rank_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

  // Multiply by e^u.
  LaurentPoly shifted(const Character& u) const;

  // Text form: `a*e^[c1,...]` terms joined by " + ", or "0".
  std::string to_string() const;

 private:
  void add_term(const Character& u, const Integer& c);

  std::size_t rank_;
  Terms terms_;
};

// Ring map Z[M] -> Z, e^u -> 1.
Integer augment(const LaurentPoly& f);

// Pushes exponents through φ : Z^rank -> Z^{φ.rows()} (φ acts on column
// vectors).
LaurentPoly map_exponents(const LaurentPoly& f, const IntMatrix& phi);

// g with f = (1 - e^w) g. Throws NotDivisible or ZeroCharacter.
LaurentPoly divide_exact(const LaurentPoly& f, const Character& w);

// Exact quotient f / g in Z[M] when it exists; nullopt otherwise.
std::optional<LaurentPoly> try_divide(const LaurentPoly& f, const LaurentPoly& g);

// Σ numerator_j / Π_{w in denominator_j} (1 - e^w)
class LocalizationSum {
 public:
  struct Term {
    LaurentPoly numerator;
    std::vector<Character> denominator;
  };

  explicit LocalizationSum(std::size_t rank) : rank_(rank) {}

  std::size_t rank() const { return rank_; }
  const std::vector<Term>& terms() const { return terms_; }
  void add(LaurentPoly numerator, std::vector<Character> denominator);

 private:
  std::size_t rank_;
  std::vector<Term> terms_;
};

// Brings the sum over a common denominator and divides it out factor by
// factor. Throws NotPolynomial if the sum is not in Z[M].
LaurentPoly reduce(const LocalizationSum& sum);

}  // namespace pexp
