#include "pexp/laurent.hpp"

#include <algorithm>
#include <utility>

#include "pexp/error.hpp"

namespace pexp {

namespace {

void check_rank(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(ErrorKind::RankMismatch,
                std::string(what) + ": rank " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

LaurentPoly LaurentPoly::constant(std::size_t rank, const Integer& c) {
  LaurentPoly p(rank);
  if (c != 0) p.terms_.emplace(Character(rank), c);
  return p;
}

LaurentPoly LaurentPoly::monomial(const Character& u, const Integer& c) {
  LaurentPoly p(u.rank());
  if (c != 0) p.terms_.emplace(u, c);
  return p;
}

LaurentPoly LaurentPoly::one_minus(const Character& w) {
  LaurentPoly p = constant(w.rank(), 1);
  p.add_term(w, -1);
  return p;
}

LaurentPoly LaurentPoly::from_terms(std::size_t rank, const std::vector<std::pair<Character, Integer>>& terms) {
  LaurentPoly p(rank);
  for (const auto& [u, c] : terms) {
    check_rank(u.rank(), rank, "term exponent");
    if (c == 0) throw Error(ErrorKind::Parse, "zero coefficient at exponent " + u.to_string());
    if (!p.terms_.emplace(u, c).second) throw Error(ErrorKind::Parse, "duplicate exponent " + u.to_string());
  }
  return p;
}

Integer LaurentPoly::coefficient(const Character& u) const {
  auto it = terms_.find(u);
  return it == terms_.end() ? Integer(0) : it->second;
}

std::optional<Character> LaurentPoly::as_unit() const {
  if (terms_.size() != 1) return std::nullopt;
  const auto& [u, c] = *terms_.begin();
  if (c != 1 && c != -1) return std::nullopt;
  return u;
}

std::optional<Integer> LaurentPoly::as_constant() const {
  if (terms_.empty()) return Integer(0);
  if (terms_.size() == 1 && terms_.begin()->first.is_zero()) return terms_.begin()->second;
  return std::nullopt;
}

void LaurentPoly::add_term(const Character& u, const Integer& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(u, c);
  if (inserted) return;
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& rhs) {
  check_rank(rank_, rhs.rank_, "addition");
  for (const auto& [u, c] : rhs.terms_) add_term(u, c);
  return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& rhs) {
  check_rank(rank_, rhs.rank_, "subtraction");
  for (const auto& [u, c] : rhs.terms_) add_term(u, -c);
  return *this;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  check_rank(a.rank_, b.rank_, "multiplication");
  LaurentPoly out(a.rank_);
  for (const auto& [u, c] : a.terms_)
    for (const auto& [v, d] : b.terms_) out.add_term(u + v, c * d);
  return out;
}

LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& rhs) { return *this = *this * rhs; }

LaurentPoly& LaurentPoly::operator*=(const Integer& k) {
  if (k == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [u, c] : terms_) c *= k;
  return *this;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly out(*this);
  for (auto& [u, c] : out.terms_) c = -c;
  return out;
}

LaurentPoly LaurentPoly::shifted(const Character& u) const {
  check_rank(rank_, u.rank(), "shift");
  LaurentPoly out(rank_);
  // Translation preserves the lexicographic order, so hinted inserts stay O(1).
  for (const auto& [v, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), v + u, c);
  return out;
}

std::string LaurentPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [u, c] : terms_) {
    if (!first) s += " + ";
    first = false;
    s += c.get_str() + "*e^[";
    for (std::size_t i = 0; i < u.rank(); ++i) {
      if (i) s += ",";
      s += u[i].get_str();
    }
    s += "]";
  }
  return s;
}

Integer augment(const LaurentPoly& f) {
  Integer s = 0;
  for (const auto& [u, c] : f.terms()) s += c;
  return s;
}

LaurentPoly map_exponents(const LaurentPoly& f, const IntMatrix& phi) {
  check_rank(phi.cols(), f.rank(), "map_exponents");
  LaurentPoly out(phi.rows());
  for (const auto& [u, c] : f.terms()) out += LaurentPoly::monomial(Character(phi.apply(u.coords())), c);
  return out;
}

LaurentPoly divide_exact(const LaurentPoly& f, const Character& w) {
  check_rank(f.rank(), w.rank(), "divide_exact");
  if (w.is_zero()) throw Error(ErrorKind::ZeroCharacter, "division by 1 - e^0");
  const std::size_t n = f.rank();
  const Integer k = gcd_of(w.coords());
  const Character w0 = primitive_character(w);

  // Coordinates y = u V in which w0 becomes the first basis vector's dual
  // direction: <y>_0 is the degree in t = e^{w0}.
  IntMatrix one_row(1, n);
  for (std::size_t i = 0; i < n; ++i) one_row(0, i) = w0[i];
  SmithForm snf = smith_normal_form(one_row);
  IntMatrix v = snf.v, vinv = snf.v_inv;
  if (snf.u(0, 0) < 0) {
    for (std::size_t r = 0; r < n; ++r) v(r, 0) = -v(r, 0);
    for (std::size_t c = 0; c < n; ++c) vinv(0, c) = -vinv(0, c);
  }

  auto to_y = [&](const Character& u) {
    std::vector<Integer> y(n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) y[c] += u[r] * v(r, c);
    return y;
  };
  auto from_y = [&](const std::vector<Integer>& y) {
    std::vector<Integer> u(n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < n; ++r) u[c] += y[r] * vinv(r, c);
    return Character(std::move(u));
  };

  // Group by the complementary coordinates; each group is univariate in t.
  std::map<std::vector<Integer>, std::map<Integer, Integer>> groups;
  for (const auto& [u, c] : f.terms()) {
    std::vector<Integer> y = to_y(u);
    Integer deg = y[0];
    y[0] = 0;
    groups[std::move(y)][deg] = c;
  }

  LaurentPoly out(n);
  for (auto& [rest, series] : groups) {
    const Integer lo = series.begin()->first;
    while (!series.empty()) {
      auto top = std::prev(series.end());
      Integer d = top->first;
      Integer c = top->second;
      Integer qdeg = d - k;
      if (qdeg < lo)
        throw Error(ErrorKind::NotDivisible, "1 - e^" + w.to_string() + " does not divide the input");
      series.erase(top);
      // r <- r - (-c t^{d-k})(1 - t^k)
      Integer& slot = series[qdeg];
      slot += c;
      if (slot == 0) series.erase(qdeg);
      std::vector<Integer> y = rest;
      y[0] = qdeg;
      out += LaurentPoly::monomial(from_y(y), -c);
    }
  }
  return out;
}

std::optional<LaurentPoly> try_divide(const LaurentPoly& f, const LaurentPoly& g) {
  check_rank(f.rank(), g.rank(), "try_divide");
  if (g.is_zero()) return std::nullopt;
  if (f.is_zero()) return LaurentPoly(f.rank());
  const std::size_t n = f.rank();

  auto min_corner = [n](const LaurentPoly& p) {
    Character lo = p.terms().begin()->first;
    for (const auto& [u, c] : p.terms())
      for (std::size_t i = 0; i < n; ++i)
        if (u[i] < lo[i]) lo[i] = u[i];
    return lo;
  };
  // Monomials are units, and once shifted so that no variable divides it the
  // divisor divides a shifted numerator iff it divides any monomial multiple
  // of it. That reduces the problem to polynomial division, where the
  // lexicographic order is a well-order.
  const Character flo = min_corner(f), glo = min_corner(g);
  LaurentPoly r = f.shifted(-flo);
  const LaurentPoly d = g.shifted(-glo);
  const auto& [dlead, dcoef] = *d.terms().rbegin();

  LaurentPoly q(n);
  while (!r.is_zero()) {
    const auto& [rlead, rcoef] = *r.terms().rbegin();
    Character e = rlead - dlead;
    for (std::size_t i = 0; i < n; ++i)
      if (e[i] < 0) return std::nullopt;
    if (!mpz_divisible_p(rcoef.get_mpz_t(), dcoef.get_mpz_t())) return std::nullopt;
    Integer c;
    mpz_divexact(c.get_mpz_t(), rcoef.get_mpz_t(), dcoef.get_mpz_t());
    LaurentPoly t = LaurentPoly::monomial(e, c);
    r -= t * d;
    q += t;
  }
  return q.shifted(flo - glo);
}

void LocalizationSum::add(LaurentPoly numerator, std::vector<Character> denominator) {
  check_rank(numerator.rank(), rank_, "localization numerator");
  for (const auto& w : denominator) {
    check_rank(w.rank(), rank_, "localization denominator");
    if (w.is_zero()) throw Error(ErrorKind::ZeroCharacter, "denominator factor 1 - e^0");
  }
  terms_.push_back({std::move(numerator), std::move(denominator)});
}

namespace {

using Multiset = std::map<Character, std::size_t>;

struct Fraction {
  LaurentPoly numerator;
  Multiset denominator;
};

LaurentPoly times_one_minus(const LaurentPoly& f, const Character& w, std::size_t times) {
  LaurentPoly out = f;
  for (std::size_t i = 0; i < times; ++i) out -= out.shifted(w);
  return out;
}

Fraction combine(const Fraction& a, const Fraction& b) {
  Multiset lcd = a.denominator;
  for (const auto& [w, m] : b.denominator) lcd[w] = std::max(lcd[w], m);
  auto lift = [&](const Fraction& x) {
    LaurentPoly num = x.numerator;
    for (const auto& [w, m] : lcd) {
      auto it = x.denominator.find(w);
      std::size_t have = it == x.denominator.end() ? 0 : it->second;
      num = times_one_minus(num, w, m - have);
    }
    return num;
  };
  return {lift(a) + lift(b), std::move(lcd)};
}

// Balanced pairwise combination; the resulting numerator over the full
// common denominator is the same as combining left to right, but
// intermediate numerators stay small when neighbouring terms share factors.
Fraction combine_range(const std::vector<Fraction>& fs, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return fs[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return combine(combine_range(fs, lo, mid), combine_range(fs, mid, hi));
}

}  // namespace

LaurentPoly reduce(const LocalizationSum& sum) {
  const std::size_t n = sum.rank();
  // Canonical denominators: 1/(1 - e^w) = -e^{-w} / (1 - e^{-w}) turns every
  // lexicographically negative w positive. Equal denominators are merged.
  std::map<Multiset, LaurentPoly> grouped;
  for (const auto& term : sum.terms()) {
    if (term.numerator.is_zero()) continue;
    LaurentPoly num = term.numerator;
    Multiset den;
    for (const auto& w : term.denominator) {
      if (lex_negative(w)) {
        num = -num.shifted(-w);
        ++den[-w];
      } else {
        ++den[w];
      }
    }
    auto [it, inserted] = grouped.try_emplace(den, num);
    if (!inserted) it->second += num;
  }
  std::vector<Fraction> fractions;
  for (auto& [den, num] : grouped)
    if (!num.is_zero()) fractions.push_back({std::move(num), den});
  if (fractions.empty()) return LaurentPoly(n);

  Fraction total = combine_range(fractions, 0, fractions.size());

  // Divide out factors ordered by their primitive direction.
  std::vector<std::pair<Character, Character>> order;
  for (const auto& [w, m] : total.denominator) order.emplace_back(primitive_character(w), w);
  std::sort(order.begin(), order.end());
  LaurentPoly result = std::move(total.numerator);
  for (const auto& [prim, w] : order) {
    for (std::size_t i = 0; i < total.denominator.at(w); ++i) {
      try {
        result = divide_exact(result, w);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotDivisible) throw;
        throw Error(ErrorKind::NotPolynomial,
                    "localization sum is not a Laurent polynomial: factor 1 - e^" + w.to_string() +
                        " does not cancel");
      }
    }
  }
  return result;
}

}  // namespace pexp
