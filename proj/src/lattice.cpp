#include "pexp/lattice.hpp"

#include <algorithm>

#include "pexp/error.hpp"

namespace pexp {

Integer pairing(const Character& u, const LatticePoint& v) {
  if (u.rank() != v.rank())
    throw Error(ErrorKind::RankMismatch, "pairing " + u.to_string() + " with " + v.to_string());
  Integer s = 0;
  for (std::size_t i = 0; i < u.rank(); ++i) s += u[i] * v[i];
  return s;
}

std::vector<Integer> SmithForm::invariant_factors() const {
  std::vector<Integer> out;
  for (std::size_t i = 0; i < rank; ++i) out.push_back(d(i, i));
  return out;
}

namespace {

// Smith form that also tracks the inverses of both transforms; the inverses
// are needed for sections and saturated spans.
struct SmithWork {
  IntMatrix d, u, uinv, v, vinv;
  std::size_t rank = 0;
};

SmithWork smith_work(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  SmithWork w{a, IntMatrix::identity(m), IntMatrix::identity(m), IntMatrix::identity(n),
              IntMatrix::identity(n), 0};
  IntMatrix& d = w.d;

  // Row op row[r] += k row[t]: U <- E U, U^{-1} <- U^{-1} E^{-1}, i.e. col[t] -= k col[r].
  auto row_op = [&](std::size_t r, std::size_t t, const Integer& k) {
    d.add_row_multiple(r, t, k);
    w.u.add_row_multiple(r, t, k);
    w.uinv.add_col_multiple(t, r, -k);
  };
  auto col_op = [&](std::size_t c, std::size_t t, const Integer& k) {
    d.add_col_multiple(c, t, k);
    w.v.add_col_multiple(c, t, k);
    w.vinv.add_row_multiple(t, c, -k);
  };

  std::size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    bool found = true;
    for (;;) {
      // Pivot: smallest nonzero |entry| in the trailing block, first in
      // row-major order on ties.
      std::size_t pi = m, pj = n;
      Integer best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j) {
          if (d(i, j) == 0) continue;
          if (pi == m || mpz_cmpabs(d(i, j).get_mpz_t(), best.get_mpz_t()) < 0) {
            best = abs(d(i, j));
            pi = i;
            pj = j;
          }
        }
      if (pi == m) {
        found = false;
        break;
      }
      d.swap_rows(t, pi);
      w.u.swap_rows(t, pi);
      w.uinv.swap_cols(t, pi);
      d.swap_cols(t, pj);
      w.v.swap_cols(t, pj);
      w.vinv.swap_rows(t, pj);

      bool clean = true;
      for (std::size_t r = t + 1; r < m; ++r) {
        if (d(r, t) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), d(r, t).get_mpz_t(), d(t, t).get_mpz_t());
        row_op(r, t, -q);
        if (d(r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < n; ++c) {
        if (d(t, c) == 0) continue;
        Integer q;
        mpz_tdiv_q(q.get_mpz_t(), d(t, c).get_mpz_t(), d(t, t).get_mpz_t());
        col_op(c, t, -q);
        if (d(t, c) != 0) clean = false;
      }
      if (!clean) continue;

      bool divisible = true;
      for (std::size_t r = t + 1; r < m && divisible; ++r)
        for (std::size_t c = t + 1; c < n; ++c)
          if (!mpz_divisible_p(d(r, c).get_mpz_t(), d(t, t).get_mpz_t())) {
            row_op(t, r, 1);
            divisible = false;
            break;
          }
      if (divisible) break;
    }
    if (!found) break;
    if (d(t, t) < 0) {
      d.negate_row(t);
      w.u.negate_row(t);
      // U^{-1} <- U^{-1} diag(-1 at t)
      for (std::size_t r = 0; r < m; ++r) w.uinv(r, t) = -w.uinv(r, t);
    }
  }
  w.rank = t;
  return w;
}

template <class Tag>
LatticeVector<Tag> primitive_of(const LatticeVector<Tag>& v) {
  Integer g = gcd_of(v.coords());
  if (g == 0) throw Error(ErrorKind::ZeroVector, "primitive generator of the zero vector");
  std::vector<Integer> c = v.coords();
  for (auto& x : c) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
  return LatticeVector<Tag>(std::move(c));
}

template <class Tag>
IntMatrix rows_of(const std::vector<LatticeVector<Tag>>& vs, std::size_t rank) {
  IntMatrix m(vs.size(), rank);
  for (std::size_t r = 0; r < vs.size(); ++r) {
    if (vs[r].rank() != rank)
      throw Error(ErrorKind::RankMismatch,
                  "vector " + vs[r].to_string() + " in a lattice of rank " + std::to_string(rank));
    for (std::size_t c = 0; c < rank; ++c) m(r, c) = vs[r][c];
  }
  return m;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  SmithWork w = smith_work(a);
  return SmithForm{std::move(w.u), std::move(w.d), std::move(w.v), std::move(w.uinv), std::move(w.vinv), w.rank};
}

LatticePoint primitive_generator(const LatticePoint& v) { return primitive_of(v); }
Character primitive_character(const Character& u) { return primitive_of(u); }

IntMatrix rows_matrix(const std::vector<LatticePoint>& vs, std::size_t rank) { return rows_of(vs, rank); }
IntMatrix rows_matrix(const std::vector<Character>& vs, std::size_t rank) { return rows_of(vs, rank); }

std::size_t lattice_rank(const std::vector<LatticePoint>& vs, std::size_t rank) {
  if (vs.empty()) return 0;
  return smith_work(rows_of(vs, rank)).rank;
}

std::vector<Character> annihilator(const std::vector<LatticePoint>& vectors, std::size_t rank) {
  std::vector<Character> out;
  if (vectors.empty()) {
    for (std::size_t i = 0; i < rank; ++i) {
      Character e(rank);
      e[i] = 1;
      out.push_back(std::move(e));
    }
    return out;
  }
  SmithWork w = smith_work(rows_of(vectors, rank));
  for (std::size_t c = w.rank; c < rank; ++c) out.emplace_back(w.v.col(c));
  return out;
}

std::vector<LatticePoint> saturated_span(const std::vector<LatticePoint>& vectors, std::size_t rank) {
  std::vector<LatticePoint> out;
  if (vectors.empty()) return out;
  SmithWork w = smith_work(rows_of(vectors, rank));
  // A = U^{-1} D V^{-1}: the row space of A over Q is spanned by the first
  // `rank` rows of V^{-1}, which are part of a lattice basis.
  for (std::size_t r = 0; r < w.rank; ++r) out.emplace_back(w.vinv.row(r));
  return out;
}

QuotientLattice QuotientLattice::identity(std::size_t rank) {
  QuotientLattice q;
  q.source_rank_ = rank;
  q.projection_ = IntMatrix::identity(rank);
  q.section_ = IntMatrix::identity(rank);
  return q;
}

QuotientLattice QuotientLattice::from_kernel(std::size_t source_rank, const std::vector<Character>& kernel_basis) {
  if (kernel_basis.empty()) return identity(source_rank);
  const std::size_t k = kernel_basis.size();
  IntMatrix a = rows_of(kernel_basis, source_rank).transpose();  // columns are kernel vectors
  SmithWork w = smith_work(a);
  if (w.rank < k) throw Error(ErrorKind::NotIndependent, "kernel basis is linearly dependent");
  for (std::size_t i = 0; i < k; ++i)
    if (w.d(i, i) != 1)
      throw Error(ErrorKind::NotSaturated,
                  "kernel basis spans a sublattice with invariant factor " + w.d(i, i).get_str());
  // U A = D V^{-1} maps the kernel onto the first k coordinates, so the
  // remaining rows of U present the quotient.
  QuotientLattice q;
  q.source_rank_ = source_rank;
  q.kernel_ = kernel_basis;
  q.projection_ = IntMatrix(source_rank - k, source_rank);
  q.section_ = IntMatrix(source_rank, source_rank - k);
  for (std::size_t r = k; r < source_rank; ++r)
    for (std::size_t c = 0; c < source_rank; ++c) {
      q.projection_(r - k, c) = w.u(r, c);
      q.section_(c, r - k) = w.uinv(c, r);
    }
  return q;
}

QuotientLattice QuotientLattice::evaluation(std::size_t source_rank, const std::vector<LatticePoint>& basis) {
  const std::size_t r = basis.size();
  QuotientLattice q;
  q.source_rank_ = source_rank;
  q.projection_ = rows_of(basis, source_rank);
  if (r == 0) {
    q.section_ = IntMatrix(source_rank, 0);
    q.kernel_ = annihilator({}, source_rank);
    return q;
  }
  SmithWork w = smith_work(q.projection_);
  if (w.rank < r) throw Error(ErrorKind::NotIndependent, "evaluation basis is linearly dependent");
  for (std::size_t i = 0; i < r; ++i)
    if (w.d(i, i) != 1) throw Error(ErrorKind::NotSaturated, "evaluation basis is not saturated");
  // P = U^{-1} [I 0] V^{-1}, so V [I;0] U is a right inverse.
  IntMatrix vi(source_rank, r);
  for (std::size_t row = 0; row < source_rank; ++row)
    for (std::size_t c = 0; c < r; ++c) vi(row, c) = w.v(row, c);
  q.section_ = vi * w.u;
  for (std::size_t c = r; c < source_rank; ++c) q.kernel_.emplace_back(w.v.col(c));
  return q;
}

Character QuotientLattice::project(const Character& u) const {
  if (u.rank() != source_rank_)
    throw Error(ErrorKind::RankMismatch, "character " + u.to_string() + " projected from rank " +
                                             std::to_string(source_rank_));
  return Character(projection_.apply(u.coords()));
}

Character QuotientLattice::lift(const Character& q) const {
  if (q.rank() != rank())
    throw Error(ErrorKind::RankMismatch, "character " + q.to_string() + " lifted from rank " +
                                             std::to_string(rank()));
  return Character(section_.apply(q.coords()));
}

std::vector<Character> dual_basis(const std::vector<LatticePoint>& basis) {
  const std::size_t n = basis.size();
  for (const auto& b : basis)
    if (b.rank() != n)
      throw Error(ErrorKind::RankMismatch, "dual basis needs n vectors of rank n; got " + b.to_string());
  std::vector<Character> out;
  if (n == 0) return out;
  SmithWork w = smith_work(rows_of(basis, n));
  bool unimodular = w.rank == n;
  for (std::size_t i = 0; i < w.rank && unimodular; ++i) unimodular = w.d(i, i) == 1;
  if (!unimodular) {
    Integer det = 1;
    for (std::size_t i = 0; i < n; ++i) det *= (i < w.rank ? w.d(i, i) : Integer(0));
    throw Error(ErrorKind::NotUnimodular, "|det| = " + det.get_str());
  }
  // U B V = I  =>  B^{-1} = V U; column j of B^{-1} is the dual of b_j.
  IntMatrix inv = w.v * w.u;
  for (std::size_t j = 0; j < n; ++j) out.emplace_back(inv.col(j));
  return out;
}

}  // namespace pexp
