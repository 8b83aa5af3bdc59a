#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "pexp/integer.hpp"

namespace pexp {

struct CocharacterTag;
struct CharacterTag;

// An integer vector in either N (cocharacters) or M (characters). The tag
// keeps the two lattices from being mixed up; the pairing between them is
// the only operation that takes one of each.
template <class Tag>
class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::size_t rank) : coords_(rank) {}
  explicit LatticeVector(std::vector<Integer> coords) : coords_(std::move(coords)) {}
  LatticeVector(std::initializer_list<long> coords) {
    coords_.reserve(coords.size());
    for (long c : coords) coords_.emplace_back(c);
  }

  std::size_t rank() const { return coords_.size(); }
  const std::vector<Integer>& coords() const { return coords_; }
  const Integer& operator[](std::size_t i) const { return coords_[i]; }
  Integer& operator[](std::size_t i) { return coords_[i]; }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != 0) return false;
    return true;
  }

  LatticeVector operator-() const {
    LatticeVector out(*this);
    for (auto& c : out.coords_) c = -c;
    return out;
  }
  LatticeVector& operator+=(const LatticeVector& rhs) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += rhs.coords_[i];
    return *this;
  }
  LatticeVector& operator-=(const LatticeVector& rhs) {
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= rhs.coords_[i];
    return *this;
  }
  LatticeVector& operator*=(const Integer& k) {
    for (auto& c : coords_) c *= k;
    return *this;
  }
  friend LatticeVector operator+(LatticeVector a, const LatticeVector& b) { return a += b; }
  friend LatticeVector operator-(LatticeVector a, const LatticeVector& b) { return a -= b; }
  friend LatticeVector operator*(const Integer& k, LatticeVector a) { return a *= k; }

  friend bool operator==(const LatticeVector& a, const LatticeVector& b) { return a.coords_ == b.coords_; }
  friend bool operator!=(const LatticeVector& a, const LatticeVector& b) { return !(a == b); }
  // Lexicographic on coordinates; shorter vectors first when ranks differ.
  friend bool operator<(const LatticeVector& a, const LatticeVector& b) {
    if (a.rank() != b.rank()) return a.rank() < b.rank();
    for (std::size_t i = 0; i < a.rank(); ++i) {
      int c = cmp(a.coords_[i], b.coords_[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ",";
      s += coords_[i].get_str();
    }
    return s + ")";
  }

 private:
  std::vector<Integer> coords_;
};

using LatticePoint = LatticeVector<CocharacterTag>;
using Character = LatticeVector<CharacterTag>;

// <u, v>
Integer pairing(const Character& u, const LatticePoint& v);

// True when the first nonzero coordinate is negative.
template <class Tag>
bool lex_negative(const LatticeVector<Tag>& v) {
  for (const auto& c : v.coords())
    if (c != 0) return c < 0;
  return false;
}

struct SmithForm {
  IntMatrix u;  // unimodular, rows x rows
  IntMatrix d;  // diagonal, d_1 | d_2 | ..., nonnegative
  IntMatrix v;  // unimodular, cols x cols
  IntMatrix u_inv;
  IntMatrix v_inv;
  std::size_t rank = 0;

  std::vector<Integer> invariant_factors() const;  // the nonzero diagonal
};

// U * A * V = D.
SmithForm smith_normal_form(const IntMatrix& a);

LatticePoint primitive_generator(const LatticePoint& v);
Character primitive_character(const Character& u);

// Rows of the returned matrix are the given vectors.
IntMatrix rows_matrix(const std::vector<LatticePoint>& vs, std::size_t rank);
IntMatrix rows_matrix(const std::vector<Character>& vs, std::size_t rank);

std::size_t lattice_rank(const std::vector<LatticePoint>& vs, std::size_t rank);

// Saturated basis of { u in M : <u, v> = 0 for all v in vectors }.
std::vector<Character> annihilator(const std::vector<LatticePoint>& vectors, std::size_t rank);

// Same construction on the N side: a saturated basis of the sublattice
// N ∩ span(vectors).
std::vector<LatticePoint> saturated_span(const std::vector<LatticePoint>& vectors, std::size_t rank);

// M / L for a saturated sublattice L, presented by an explicit projection to
// Z^r and a section back. Also used for M_σ = M / (σ^⊥ ∩ M), where the
// projection is evaluation on a lattice basis of N_σ.
class QuotientLattice {
 public:
  QuotientLattice() = default;

  // The generic construction from a saturated, independent kernel basis.
  static QuotientLattice from_kernel(std::size_t source_rank, const std::vector<Character>& kernel_basis);
  // Projection given as evaluation on the rows of `basis`, which must be a
  // basis of a saturated sublattice of N.
  static QuotientLattice evaluation(std::size_t source_rank, const std::vector<LatticePoint>& basis);
  static QuotientLattice identity(std::size_t rank);

  std::size_t source_rank() const { return source_rank_; }
  std::size_t rank() const { return projection_.rows(); }
  const std::vector<Character>& kernel_basis() const { return kernel_; }
  const IntMatrix& projection() const { return projection_; }  // rank x source_rank
  const IntMatrix& section() const { return section_; }        // source_rank x rank

  Character project(const Character& u) const;
  Character lift(const Character& q) const;

  bool operator==(const QuotientLattice& o) const {
    return source_rank_ == o.source_rank_ && projection_ == o.projection_;
  }

 private:
  std::size_t source_rank_ = 0;
  std::vector<Character> kernel_;
  IntMatrix projection_;
  IntMatrix section_;
};

// Characters u_i with <u_i, b_j> = δ_ij. Requires the matrix of b unimodular.
std::vector<Character> dual_basis(const std::vector<LatticePoint>& basis);

}  // namespace pexp
