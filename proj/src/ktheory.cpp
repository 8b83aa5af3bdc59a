#include "pexp/ktheory.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>
#include <string>

namespace pexp {

namespace {

std::string set_name(const RaySet& r) {
  std::string s = "{";
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s + "}";
}

void check_epsilon(int epsilon) {
  if (epsilon != 1 && epsilon != -1)
    throw Error(ErrorKind::InvalidArgument, "epsilon must be +1 or -1, got " + std::to_string(epsilon));
}

void require_smooth_complete(const Fan& fan) {
  if (!is_complete(fan)) throw Error(ErrorKind::NotComplete, "fan is not complete");
  for (std::size_t i = 0; i < fan.num_maximal(); ++i)
    if (!fan.maximal_cone(i).is_smooth())
      throw Error(ErrorKind::NotSmooth, "maximal cone " + set_name(fan.maximal_cones()[i]) + " is singular");
}

LaurentPoly exact_quotient(const LaurentPoly& a, const LaurentPoly& b) {
  std::optional<LaurentPoly> q = try_divide(a, b);
  if (!q) throw std::logic_error("fraction-free elimination produced an inexact step");
  return std::move(*q);
}

struct Echelon {
  std::vector<std::size_t> pivot_columns;
  std::vector<std::size_t> row_order;  // original row index of each echelon row
};

// Fraction-free row echelon form. Every intermediate entry is a minor of the
// input, so each division is exact.
Echelon bareiss_echelon(LaurentMatrix m, std::size_t rank) {
  Echelon e;
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  for (std::size_t i = 0; i < rows; ++i) e.row_order.push_back(i);
  LaurentPoly prev = LaurentPoly::constant(rank, 1);
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t p = row;
    while (p < rows && m[p][col].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[row]);
    std::swap(e.row_order[p], e.row_order[row]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c)
        m[r][c] = exact_quotient(m[row][col] * m[r][c] - m[r][col] * m[row][c], prev);
      m[r][col] = LaurentPoly(rank);
    }
    prev = m[row][col];
    e.pivot_columns.push_back(col);
    ++row;
  }
  return e;
}

LaurentMatrix minor_without(const LaurentMatrix& m, std::size_t skip_row, std::size_t skip_col) {
  LaurentMatrix out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i == skip_row) continue;
    std::vector<LaurentPoly> r;
    for (std::size_t j = 0; j < m[i].size(); ++j)
      if (j != skip_col) r.push_back(m[i][j]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<Character> tangent_weights(const Cone& sigma, int epsilon) {
  check_epsilon(epsilon);
  if (sigma.dim() != sigma.rank())
    throw Error(ErrorKind::NotFullDimensional,
                "cone of dimension " + std::to_string(sigma.dim()) + " in rank " + std::to_string(sigma.rank()));
  if (!sigma.is_smooth())
    throw Error(ErrorKind::NotSmooth, "cone has multiplicity " + sigma.multiplicity().get_str());
  std::vector<Character> w = dual_basis(sigma.generators());
  if (epsilon < 0)
    for (auto& x : w) x = -x;
  return w;
}

FixedPointData fixed_point_data(const Fan& fan, std::vector<LaurentPoly> numerators, int epsilon) {
  if (numerators.size() != fan.num_maximal())
    throw Error(ErrorKind::InvalidArgument, std::to_string(numerators.size()) + " numerators for " +
                                                std::to_string(fan.num_maximal()) + " fixed points");
  FixedPointData d;
  for (std::size_t i = 0; i < fan.num_maximal(); ++i) d.tangent_weights.push_back(tangent_weights(fan.maximal_cone(i), epsilon));
  d.numerators = std::move(numerators);
  return d;
}

FixedPointData orbit_closure_class(const Fan& fan, const RaySet& tau, int epsilon) {
  fan.cone_id(tau);
  FixedPointData d;
  for (std::size_t i = 0; i < fan.num_maximal(); ++i) {
    const RaySet& s = fan.maximal_cones()[i];
    d.tangent_weights.push_back(tangent_weights(fan.maximal_cone(i), epsilon));
    LaurentPoly num(fan.rank());
    if (std::includes(s.begin(), s.end(), tau.begin(), tau.end())) {
      num = LaurentPoly::constant(fan.rank(), 1);
      for (std::size_t k = 0; k < s.size(); ++k)
        if (std::binary_search(tau.begin(), tau.end(), s[k])) num *= LaurentPoly::one_minus(d.tangent_weights[i][k]);
    }
    d.numerators.push_back(std::move(num));
  }
  return d;
}

LaurentPoly euler_characteristic(const Fan& fan, const FixedPointData& data) {
  require_smooth_complete(fan);
  if (data.numerators.size() != fan.num_maximal() || data.tangent_weights.size() != fan.num_maximal())
    throw Error(ErrorKind::InvalidArgument, "fixed-point data does not match the fan");
  LocalizationSum sum(fan.rank());
  for (std::size_t i = 0; i < fan.num_maximal(); ++i) {
    if (data.numerators[i].rank() != fan.rank())
      throw Error(ErrorKind::RankMismatch, "numerator at fixed point " + std::to_string(i));
    if (!data.numerators[i].is_zero()) sum.add(data.numerators[i], data.tangent_weights[i]);
  }
  return reduce(sum);
}

Localizer::Localizer(FanPtr fan, LocalizationOptions options) : fan_(std::move(fan)), options_(options) {
  check_epsilon(options_.epsilon);
  if (!is_complete(*fan_)) throw Error(ErrorKind::NotComplete, "fan is not complete");
  resolution_ = resolve(fan_, options_.resolve);
  cache_weights();
}

Localizer::Localizer(SubdivisionMap resolution, LocalizationOptions options)
    : fan_(resolution.coarse), options_(options), resolution_(std::move(resolution)) {
  check_epsilon(options_.epsilon);
  if (!is_complete(*fan_)) throw Error(ErrorKind::NotComplete, "fan is not complete");
  cache_weights();
}

void Localizer::cache_weights() {
  const Fan& fine = *resolution_.fine;
  for (std::size_t i = 0; i < fine.num_maximal(); ++i)
    weights_.push_back(tangent_weights(fine.maximal_cone(i), options_.epsilon));
}

LaurentPoly Localizer::chi(const PExpFun& f) const {
  if (!same_fan(f.fan(), fan_)) throw Error(ErrorKind::FanMismatch, "function lives on a different fan");
  PExpFun g = pullback(f, resolution_);
  return euler_characteristic(*resolution_.fine, FixedPointData{weights_, g.values()});
}

std::vector<RaySet> Localizer::strict_transform_candidates(const RaySet& tau) const {
  const Cone& t = fan_->cone(fan_->cone_id(tau));
  const Fan& fine = *resolution_.fine;
  std::vector<RaySet> out;
  for (std::size_t id = 0; id < fine.num_cones(); ++id) {
    const Cone& c = fine.cone(id);
    if (c.dim() != t.dim()) continue;
    bool inside = true;
    for (const auto& g : c.generators())
      if (!t.contains(g)) {
        inside = false;
        break;
      }
    if (inside) out.push_back(fine.cone_set(id));
  }
  std::sort(out.begin(), out.end());
  return out;
}

LaurentPoly Localizer::pair(const PExpFun& f, const RaySet& tau) const {
  if (!same_fan(f.fan(), fan_)) throw Error(ErrorKind::FanMismatch, "function lives on a different fan");
  std::vector<RaySet> candidates = strict_transform_candidates(tau);
  if (candidates.empty()) throw std::logic_error("no strict transform for cone " + set_name(tau));
  const RaySet& chosen = candidates[options_.strict_transform_choice % candidates.size()];
  const Fan& fine = *resolution_.fine;
  FixedPointData d = orbit_closure_class(fine, chosen, options_.epsilon);
  PExpFun g = pullback(f, resolution_);
  for (std::size_t i = 0; i < fine.num_maximal(); ++i)
    if (!d.numerators[i].is_zero()) d.numerators[i] *= g.value(i);
  return euler_characteristic(fine, d);
}

LaurentPoly chi(const PExpFun& f, const LocalizationOptions& options) {
  return Localizer(f.fan(), options).chi(f);
}

LaurentPoly kronecker_pair(const PExpFun& f, const RaySet& tau, const LocalizationOptions& options) {
  return Localizer(f.fan(), options).pair(f, tau);
}

PairingMatrix gram_matrix(FanPtr fan, const std::vector<PExpFun>& functions, const std::vector<RaySet>& taus,
                          const LocalizationOptions& options) {
  PairingMatrix g;
  g.columns = taus;
  for (std::size_t i = 0; i < functions.size(); ++i) g.row_labels.push_back("f" + std::to_string(i));
  if (functions.empty()) return g;
  for (const auto& tau : taus) fan->cone_id(tau);
  for (const auto& f : functions)
    if (!same_fan(f.fan(), fan)) throw Error(ErrorKind::FanMismatch, "function lives on a different fan");
  const Localizer loc(fan, options);
  std::vector<std::future<std::vector<LaurentPoly>>> rows;
  for (const auto& f : functions)
    rows.push_back(std::async(std::launch::async, [&loc, &f, &taus] {
      std::vector<LaurentPoly> r;
      for (const auto& tau : taus) r.push_back(loc.pair(f, tau));
      return r;
    }));
  for (auto& r : rows) g.entries.push_back(r.get());
  return g;
}

LaurentPoly determinant(const LaurentMatrix& m, std::size_t rank) {
  const std::size_t n = m.size();
  for (const auto& r : m)
    if (r.size() != n) throw Error(ErrorKind::InvalidArgument, "determinant of a non-square matrix");
  if (n == 0) return LaurentPoly::constant(rank, 1);
  LaurentMatrix a = m;
  LaurentPoly prev = LaurentPoly::constant(rank, 1);
  bool negate = false;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k].is_zero()) ++p;
    if (p == n) return LaurentPoly(rank);
    if (p != k) {
      std::swap(a[p], a[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] = exact_quotient(a[k][k] * a[i][j] - a[i][k] * a[k][j], prev);
    prev = a[k][k];
  }
  return negate ? -a[n - 1][n - 1] : a[n - 1][n - 1];
}

bool is_unit(const LaurentPoly& p) { return p.as_unit().has_value(); }

std::vector<LaurentPoly> decompose(const PExpFun& f, const std::vector<PExpFun>& basis) {
  const Fan& fan = *f.fan();
  const std::size_t n = fan.rank();
  for (const auto& b : basis)
    if (!same_fan(b.fan(), f.fan())) throw Error(ErrorKind::FanMismatch, "basis function lives on a different fan");
  const std::size_t k = basis.size();

  // Coefficients live in Z[M]; only full-dimensional cones see all of M.
  LaurentMatrix system;
  for (std::size_t i = 0; i < fan.num_maximal(); ++i) {
    if (fan.maximal_cone(i).dim() != n) continue;
    std::vector<LaurentPoly> row;
    for (const auto& b : basis) row.push_back(b.value(i));
    row.push_back(f.value(i));
    system.push_back(std::move(row));
  }
  if (system.empty()) throw Error(ErrorKind::InvalidArgument, "fan has no full-dimensional maximal cone");

  Echelon e = bareiss_echelon(system, n);
  const std::size_t basis_rank =
      std::count_if(e.pivot_columns.begin(), e.pivot_columns.end(), [k](std::size_t c) { return c < k; });
  if (basis_rank < k)
    throw Error(ErrorKind::DependentBasis, "basis has rank " + std::to_string(basis_rank) + " but " +
                                               std::to_string(k) + " elements");
  if (e.pivot_columns.size() > k) throw Error(ErrorKind::NotInSpan, "function is not in the span of the basis");

  LaurentMatrix a;
  std::vector<LaurentPoly> rhs;
  for (std::size_t r = 0; r < k; ++r) {
    const auto& row = system[e.row_order[r]];
    a.emplace_back(row.begin(), row.begin() + k);
    rhs.push_back(row[k]);
  }
  const LaurentPoly det = determinant(a, n);
  std::vector<LaurentPoly> coeffs;
  for (std::size_t c = 0; c < k; ++c) {
    LaurentMatrix ac = a;
    for (std::size_t r = 0; r < k; ++r) ac[r][c] = rhs[r];
    std::optional<LaurentPoly> q = try_divide(determinant(ac, n), det);
    if (!q)
      throw Error(ErrorKind::NotIntegral, "coefficient " + std::to_string(c) + " is not in Z[M]");
    coeffs.push_back(std::move(*q));
  }

  PExpFun sum = PExpFun::constant(f.fan(), LaurentPoly(n));
  for (std::size_t c = 0; c < k; ++c) sum = sum + coeffs[c] * basis[c];
  if (sum != f) throw Error(ErrorKind::NotInSpan, "solution does not reproduce the function on every cone");
  return coeffs;
}

std::vector<PExpFun> dual_basis_solve(FanPtr fan, const std::vector<RaySet>& taus, const std::vector<PExpFun>& spanning,
                                      const LocalizationOptions& options) {
  if (taus.size() != spanning.size())
    throw Error(ErrorKind::InvalidArgument, std::to_string(taus.size()) + " cones for " +
                                                std::to_string(spanning.size()) + " spanning functions");
  const std::size_t n = fan->rank();
  const std::size_t k = taus.size();
  const PairingMatrix pm = gram_matrix(fan, spanning, taus, options);
  const LaurentMatrix& g = pm.entries;
  const LaurentPoly det = determinant(g, n);
  if (det.is_zero()) throw Error(ErrorKind::SingularGram, "Gram matrix has determinant 0");

  // C = adj(G) / det(G); C_ji = (-1)^{i+j} det(G without row i, column j) / det
  std::vector<PExpFun> out;
  for (std::size_t j = 0; j < k; ++j) {
    PExpFun gj = PExpFun::constant(fan, LaurentPoly(n));
    for (std::size_t i = 0; i < k; ++i) {
      LaurentPoly cof = determinant(minor_without(g, i, j), n);
      if ((i + j) % 2) cof = -cof;
      std::optional<LaurentPoly> c = try_divide(cof, det);
      if (!c)
        throw Error(ErrorKind::NotIntegral, "inverse Gram entry (" + std::to_string(j) + "," + std::to_string(i) +
                                                ") is not in Z[M]; det = " + det.to_string());
      gj = gj + *c * spanning[i];
    }
    out.push_back(make_pexp(fan, gj.values()));
  }

  const PairingMatrix check = gram_matrix(fan, out, taus, options);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (check.entries[i][j] != LaurentPoly::constant(n, i == j ? 1 : 0))
        throw std::logic_error("dual basis failed verification at (" + std::to_string(i) + "," + std::to_string(j) + ")");
  return out;
}

}  // namespace pexp
