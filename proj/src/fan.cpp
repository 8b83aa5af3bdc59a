#include "pexp/fan.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "pexp/error.hpp"

namespace pexp {

namespace {

std::string ray_set_string(const RaySet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "}";
}

LatticePoint as_point(const Character& c) { return LatticePoint(c.coords()); }

// Common kernel in N of a family of characters.
std::vector<LatticePoint> kernel_points(const std::vector<Character>& forms, std::size_t rank) {
  std::vector<LatticePoint> as_pts;
  as_pts.reserve(forms.size());
  for (const auto& f : forms) as_pts.push_back(as_point(f));
  std::vector<LatticePoint> out;
  for (const auto& k : annihilator(as_pts, rank)) out.push_back(as_point(k));
  return out;
}

std::size_t character_rank(const std::vector<Character>& forms, std::size_t rank) {
  std::vector<LatticePoint> as_pts;
  for (const auto& f : forms) as_pts.push_back(as_point(f));
  return lattice_rank(as_pts, rank);
}

// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

// ---------------------------------------------------------------- Cone

Cone Cone::from_generators(std::size_t rank, std::vector<LatticePoint> generators) {
  for (std::size_t i = 0; i < generators.size(); ++i) {
    const auto& g = generators[i];
    if (g.rank() != rank)
      throw Error(ErrorKind::RankMismatch, "generator " + g.to_string() + " in rank " + std::to_string(rank));
    if (g.is_zero()) throw Error(ErrorKind::ZeroVector, "zero generator");
    if (gcd_of(g.coords()) != 1) throw Error(ErrorKind::NonPrimitiveRay, "generator " + g.to_string());
    for (std::size_t j = 0; j < i; ++j)
      if (generators[j] == g) throw Error(ErrorKind::DuplicateRay, "generator " + g.to_string());
  }
  Cone c;
  c.rank_ = rank;
  c.generators_ = std::move(generators);
  c.compute(false);
  return c;
}

Cone Cone::hull(std::size_t rank, const std::vector<LatticePoint>& vectors) {
  std::vector<LatticePoint> gens;
  for (const auto& v : vectors) {
    if (v.rank() != rank) throw Error(ErrorKind::RankMismatch, "vector " + v.to_string());
    if (v.is_zero()) continue;
    LatticePoint p = primitive_generator(v);
    if (std::find(gens.begin(), gens.end(), p) == gens.end()) gens.push_back(std::move(p));
  }
  Cone c;
  c.rank_ = rank;
  c.generators_ = std::move(gens);
  c.compute(true);
  return c;
}

void Cone::compute(bool prune) {
  const std::size_t n = rank_;
  const std::size_t k = generators_.size();
  facet_normals_.clear();
  facets_.clear();
  equations_.clear();
  span_basis_.clear();
  index_ = 1;
  if (k == 0) {
    dim_ = 0;
    equations_ = annihilator({}, n);
    return;
  }

  SmithForm snf = smith_normal_form(rows_matrix(generators_, n));
  const std::size_t d = snf.rank;
  dim_ = d;
  for (std::size_t r = 0; r < d; ++r) span_basis_.emplace_back(snf.v_inv.row(r));
  for (std::size_t c = d; c < n; ++c) equations_.emplace_back(snf.v.col(c));
  for (std::size_t i = 0; i < d; ++i) index_ *= snf.d(i, i);

  const bool simplicial = k == d;
  if (!simplicial && n > 4)
    throw Error(ErrorKind::UnsupportedDimension,
                "non-simplicial cone in rank " + std::to_string(n) + " (limit 4)");

  // Generator coordinates in the basis of N_σ given by the first d rows of V^{-1}.
  std::vector<LatticePoint> coords;
  coords.reserve(k);
  for (const auto& g : generators_) {
    LatticePoint y(d);
    for (std::size_t c = 0; c < d; ++c)
      for (std::size_t r = 0; r < n; ++r) y[c] += g[r] * snf.v(r, c);
    coords.push_back(std::move(y));
  }

  // Facets inside Z^d: hyperplanes through d-1 independent generators with
  // every generator weakly on one side.
  std::map<std::vector<std::size_t>, Character> found;
  auto try_subset = [&](const std::vector<std::size_t>& subset) {
    std::vector<LatticePoint> pts;
    for (std::size_t i : subset) pts.push_back(coords[i]);
    if (lattice_rank(pts, d) != d - 1) return;
    std::vector<Character> ker = annihilator(pts, d);
    Character eta = ker.front();
    bool pos = false, neg = false;
    std::vector<std::size_t> zero;
    for (std::size_t i = 0; i < k; ++i) {
      int s = sgn(pairing(eta, coords[i]));
      if (s > 0) pos = true;
      if (s < 0) neg = true;
      if (s == 0) zero.push_back(i);
    }
    if (pos && neg) return;
    if (neg) eta = -eta;
    found.emplace(std::move(zero), std::move(eta));
  };
  if (simplicial) {
    for (std::size_t j = 0; j < k; ++j) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < k; ++i)
        if (i != j) others.push_back(i);
      try_subset(others);
    }
  } else {
    for_each_subset(k, d - 1, try_subset);
  }

  std::vector<Character> etas;
  for (const auto& [zero, eta] : found) etas.push_back(eta);
  if (character_rank(etas, d) != d)
    throw Error(ErrorKind::NotStronglyConvex, "cone spanned by generators contains a line");

  std::vector<std::size_t> extreme;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Character> through;
    for (const auto& [zero, eta] : found)
      if (std::binary_search(zero.begin(), zero.end(), i)) through.push_back(eta);
    if (character_rank(through, d) == d - 1) extreme.push_back(i);
  }
  if (extreme.size() != k) {
    if (!prune) {
      for (std::size_t i = 0; i < k; ++i)
        if (!std::binary_search(extreme.begin(), extreme.end(), i))
          throw Error(ErrorKind::RedundantGenerator,
                      "generator " + generators_[i].to_string() + " is not an extreme ray");
    }
    std::vector<LatticePoint> kept;
    for (std::size_t i : extreme) kept.push_back(generators_[i]);
    generators_ = std::move(kept);
    compute(false);
    return;
  }

  // Lift each η in (Z^d)^* to M: u = V (η, 0).
  for (const auto& [zero, eta] : found) {
    Character u(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c) u[r] += snf.v(r, c) * eta[c];
    facet_normals_.push_back(std::move(u));
    facets_.push_back(zero);
  }
}

bool Cone::contains(const LatticePoint& v) const {
  for (const auto& e : equations_)
    if (pairing(e, v) != 0) return false;
  for (const auto& u : facet_normals_)
    if (pairing(u, v) < 0) return false;
  return true;
}

bool Cone::relative_interior_contains(const LatticePoint& v) const {
  for (const auto& e : equations_)
    if (pairing(e, v) != 0) return false;
  for (const auto& u : facet_normals_)
    if (pairing(u, v) <= 0) return false;
  return true;
}

std::vector<std::vector<std::size_t>> Cone::faces() const {
  const std::size_t k = generators_.size();
  std::set<std::vector<std::size_t>> out;
  if (is_simplicial()) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < k; ++i)
        if (mask & (std::size_t{1} << i)) s.push_back(i);
      out.insert(std::move(s));
    }
  } else {
    std::vector<std::size_t> all(k);
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::vector<std::size_t>> stack{all};
    out.insert(all);
    while (!stack.empty()) {
      auto face = std::move(stack.back());
      stack.pop_back();
      for (const auto& facet : facets_) {
        std::vector<std::size_t> meet;
        std::set_intersection(face.begin(), face.end(), facet.begin(), facet.end(), std::back_inserter(meet));
        if (out.insert(meet).second) stack.push_back(std::move(meet));
      }
    }
  }
  return {out.begin(), out.end()};
}

Integer Cone::multiplicity() const {
  if (!is_simplicial())
    throw Error(ErrorKind::NotSimplicial, "multiplicity of a cone with " + std::to_string(generators_.size()) +
                                              " generators in dimension " + std::to_string(dim_));
  return index_;
}

QuotientLattice Cone::character_quotient() const {
  if (dim_ == rank_) return QuotientLattice::identity(rank_);
  if (is_simplicial() && index_ == 1) return QuotientLattice::evaluation(rank_, generators_);
  return QuotientLattice::evaluation(rank_, span_basis_);
}

Integer multiplicity(const Cone& c) { return c.multiplicity(); }

// ---------------------------------------------------------------- Fan

Fan Fan::assemble(std::size_t rank, std::vector<LatticePoint> rays, std::vector<RaySet> maximal_cones) {
  Fan f;
  f.rank_ = rank;
  f.rays_ = std::move(rays);
  for (std::size_t i = 0; i < f.rays_.size(); ++i) f.ray_lookup_.emplace(f.rays_[i], i);
  for (auto& s : maximal_cones) std::sort(s.begin(), s.end());
  f.maximal_ = std::move(maximal_cones);

  auto gens_of = [&](const RaySet& s) {
    std::vector<LatticePoint> g;
    for (std::size_t i : s) g.push_back(f.rays_[i]);
    return g;
  };

  std::map<RaySet, Cone> all;
  for (const auto& s : f.maximal_) {
    Cone c = Cone::from_generators(rank, gens_of(s));
    for (const auto& local : c.faces()) {
      RaySet global;
      for (std::size_t i : local) global.push_back(s[i]);
      if (all.count(global)) continue;
      if (global == s)
        all.emplace(global, c);
      else
        all.emplace(global, Cone::from_generators(rank, gens_of(global)));
    }
  }
  std::vector<std::pair<std::size_t, RaySet>> order;
  for (const auto& [s, c] : all) order.emplace_back(c.dim(), s);
  std::sort(order.begin(), order.end());
  for (auto& [dim, s] : order) {
    f.cone_lookup_.emplace(s, f.cone_sets_.size());
    f.cones_.push_back(all.at(s));
    f.quotients_.push_back(f.cones_.back().character_quotient());
    f.cone_sets_.push_back(std::move(s));
  }
  for (const auto& s : f.maximal_) f.maximal_index_.push_back(f.cone_lookup_.at(s));
  return f;
}

Fan Fan::build(std::size_t rank, std::vector<LatticePoint> rays, std::vector<RaySet> maximal_cones) {
  for (std::size_t i = 0; i < rays.size(); ++i) {
    const auto& r = rays[i];
    if (r.rank() != rank)
      throw Error(ErrorKind::RankMismatch, "ray " + std::to_string(i) + " has rank " + std::to_string(r.rank()));
    if (r.is_zero()) throw Error(ErrorKind::ZeroVector, "ray " + std::to_string(i) + " is zero");
    if (gcd_of(r.coords()) != 1)
      throw Error(ErrorKind::NonPrimitiveRay, "ray " + std::to_string(i) + " = " + r.to_string());
    for (std::size_t j = 0; j < i; ++j)
      if (rays[j] == r)
        throw Error(ErrorKind::DuplicateRay, "rays " + std::to_string(j) + " and " + std::to_string(i));
  }
  if (maximal_cones.empty()) throw Error(ErrorKind::NotAFan, "a fan needs at least one cone");
  std::set<RaySet> seen;
  for (auto& s : maximal_cones) {
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= rays.size())
        throw Error(ErrorKind::InvalidArgument, "cone " + ray_set_string(s) + " uses unknown ray");
      if (i && s[i] == s[i - 1]) throw Error(ErrorKind::InvalidArgument, "cone " + ray_set_string(s) + " repeats a ray");
    }
    if (!seen.insert(s).second) throw Error(ErrorKind::NotAFan, "duplicate cone " + ray_set_string(s));
  }
  Fan f = assemble(rank, std::move(rays), std::move(maximal_cones));
  check_fan_axiom(f);
  return f;
}

std::optional<std::size_t> Fan::find_cone(const RaySet& rays) const {
  RaySet s = rays;
  std::sort(s.begin(), s.end());
  auto it = cone_lookup_.find(s);
  if (it == cone_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Fan::cone_id(const RaySet& rays) const {
  auto id = find_cone(rays);
  if (!id) throw Error(ErrorKind::ConeNotInFan, "cone " + ray_set_string(rays));
  return *id;
}

std::optional<std::size_t> Fan::ray_index(const LatticePoint& v) const {
  auto it = ray_lookup_.find(v);
  if (it == ray_lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Fan::maximal_cones_containing(const RaySet& tau) const {
  RaySet t = tau;
  std::sort(t.begin(), t.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < maximal_.size(); ++i)
    if (std::includes(maximal_[i].begin(), maximal_[i].end(), t.begin(), t.end())) out.push_back(i);
  return out;
}

bool Fan::is_smooth() const {
  for (std::size_t i = 0; i < maximal_.size(); ++i) {
    const Cone& c = maximal_cone(i);
    if (c.dim() != rank_ || !c.is_smooth()) return false;
  }
  return true;
}

std::vector<LatticePoint> intersection_rays(const Cone& a, const Cone& b) {
  const std::size_t n = a.rank();
  std::vector<Character> eqs = a.equations();
  eqs.insert(eqs.end(), b.equations().begin(), b.equations().end());
  std::vector<Character> ineqs = a.facet_normals();
  ineqs.insert(ineqs.end(), b.facet_normals().begin(), b.facet_normals().end());
  // The intersection of two pointed cones also lies in both spans, so the
  // equations of both bound it even when a has no facets.
  const std::size_t eq_rank = character_rank(eqs, n);
  std::vector<LatticePoint> out;
  if (eq_rank >= n) return out;
  const std::size_t need = n - 1 - eq_rank;

  auto feasible = [&](const LatticePoint& r) {
    for (const auto& u : ineqs)
      if (pairing(u, r) < 0) return false;
    return true;
  };
  for_each_subset(ineqs.size(), need, [&](const std::vector<std::size_t>& subset) {
    std::vector<Character> rows = eqs;
    for (std::size_t i : subset) rows.push_back(ineqs[i]);
    std::vector<LatticePoint> ker = kernel_points(rows, n);
    if (ker.size() != 1) return;
    for (const LatticePoint& r : {ker.front(), LatticePoint(-ker.front())}) {
      if (!feasible(r)) continue;
      LatticePoint p = primitive_generator(r);
      if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
    }
  });
  std::sort(out.begin(), out.end());
  return out;
}

void check_fan_axiom(const Fan& fan) {
  const std::size_t m = fan.num_maximal();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const RaySet& si = fan.maximal_cones()[i];
      const RaySet& sj = fan.maximal_cones()[j];
      RaySet meet;
      for (const auto& r : intersection_rays(fan.maximal_cone(i), fan.maximal_cone(j))) {
        auto idx = fan.ray_index(r);
        if (!idx)
          throw Error(ErrorKind::NotAFan, "cones " + ray_set_string(si) + " and " + ray_set_string(sj) +
                                              " meet along " + r.to_string() + ", which is not a ray of the fan");
        meet.push_back(*idx);
      }
      std::sort(meet.begin(), meet.end());
      auto is_face_of = [&](const RaySet& s) {
        if (!std::includes(s.begin(), s.end(), meet.begin(), meet.end())) return false;
        auto id = fan.find_cone(meet);
        return id.has_value();
      };
      if (!is_face_of(si) || !is_face_of(sj))
        throw Error(ErrorKind::NotAFan, "cones " + ray_set_string(si) + " and " + ray_set_string(sj) +
                                            " meet in " + ray_set_string(meet) + ", which is not a common face");
      if (meet == si || meet == sj)
        throw Error(ErrorKind::NotAFan,
                    "maximal cone " + ray_set_string(meet == si ? si : sj) + " is a face of another maximal cone");
    }
}

bool is_complete(const Fan& fan) {
  const std::size_t n = fan.rank();
  const std::size_t m = fan.num_maximal();
  for (std::size_t i = 0; i < m; ++i)
    if (fan.maximal_cone(i).dim() != n) return false;

  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };

  for (std::size_t i = 0; i < m; ++i) {
    const Cone& c = fan.maximal_cone(i);
    const RaySet& s = fan.maximal_cones()[i];
    for (std::size_t f = 0; f < c.facets().size(); ++f) {
      RaySet facet;
      for (std::size_t local : c.facets()[f]) facet.push_back(s[local]);
      const Character& normal = c.facet_normals()[f];
      std::size_t partners = 0;
      bool opposite = false;
      for (std::size_t j : fan.maximal_cones_containing(facet)) {
        if (j == i) continue;
        ++partners;
        for (std::size_t r : fan.maximal_cones()[j])
          if (pairing(normal, fan.rays()[r]) < 0) opposite = true;
        parent[find(i)] = find(j);
      }
      if (partners != 1 || !opposite) return false;
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (find(i) != find(0)) return false;
  return m > 0;
}

StarQuotient star_quotient(const Fan& fan, const RaySet& tau_rays) {
  const std::size_t tau_id = fan.cone_id(tau_rays);
  const RaySet& tau = fan.cone_set(tau_id);
  const Cone& tau_cone = fan.cone(tau_id);
  const std::size_t n = fan.rank();
  std::vector<Character> forms = annihilator(tau_cone.generators(), n);
  const std::size_t q = forms.size();
  IntMatrix proj = rows_matrix(forms, n);

  std::vector<LatticePoint> rays;
  std::map<LatticePoint, std::size_t> lookup;
  std::vector<RaySet> cones;
  std::vector<std::size_t> source;
  for (std::size_t i : fan.maximal_cones_containing(tau)) {
    std::vector<LatticePoint> images;
    for (std::size_t r : fan.maximal_cones()[i]) {
      if (std::binary_search(tau.begin(), tau.end(), r)) continue;
      images.emplace_back(proj.apply(fan.rays()[r].coords()));
    }
    Cone image = Cone::hull(q, images);
    RaySet s;
    for (const auto& g : image.generators()) {
      auto [it, inserted] = lookup.emplace(g, rays.size());
      if (inserted) rays.push_back(g);
      s.push_back(it->second);
    }
    std::sort(s.begin(), s.end());
    cones.push_back(std::move(s));
    source.push_back(i);
  }
  return StarQuotient{Fan::build(q, std::move(rays), std::move(cones)), std::move(proj), std::move(source)};
}

// ---------------------------------------------------------------- subdivisions

SubdivisionMap SubdivisionMap::identity(FanPtr fan) {
  std::vector<std::size_t> a(fan->num_maximal());
  std::iota(a.begin(), a.end(), 0);
  return SubdivisionMap{fan, fan, std::move(a)};
}

SubdivisionMap compose(const SubdivisionMap& fine_to_mid, const SubdivisionMap& mid_to_coarse) {
  if (*fine_to_mid.coarse != *mid_to_coarse.fine)
    throw Error(ErrorKind::FanMismatch, "composing subdivisions through different fans");
  std::vector<std::size_t> a;
  a.reserve(fine_to_mid.assignment.size());
  for (std::size_t mid : fine_to_mid.assignment) a.push_back(mid_to_coarse.assignment[mid]);
  return SubdivisionMap{fine_to_mid.fine, mid_to_coarse.coarse, std::move(a)};
}

SubdivisionMap stellar_subdivision(FanPtr fan, const LatticePoint& ray) {
  const Fan& f = *fan;
  if (ray.rank() != f.rank()) throw Error(ErrorKind::RankMismatch, "subdivision ray " + ray.to_string());
  if (ray.is_zero()) throw Error(ErrorKind::ZeroVector, "subdivision at the origin");
  if (gcd_of(ray.coords()) != 1) throw Error(ErrorKind::NonPrimitiveRay, "subdivision ray " + ray.to_string());
  if (f.ray_index(ray)) return SubdivisionMap::identity(fan);

  std::vector<LatticePoint> rays = f.rays();
  const std::size_t fresh = rays.size();
  rays.push_back(ray);
  std::vector<RaySet> cones;
  std::vector<std::size_t> assignment;
  bool inside = false;
  for (std::size_t i = 0; i < f.num_maximal(); ++i) {
    const Cone& c = f.maximal_cone(i);
    const RaySet& s = f.maximal_cones()[i];
    if (!c.contains(ray)) {
      cones.push_back(s);
      assignment.push_back(i);
      continue;
    }
    inside = true;
    for (std::size_t k = 0; k < c.facets().size(); ++k) {
      if (pairing(c.facet_normals()[k], ray) <= 0) continue;
      RaySet join{fresh};
      for (std::size_t local : c.facets()[k]) join.push_back(s[local]);
      std::sort(join.begin(), join.end());
      cones.push_back(std::move(join));
      assignment.push_back(i);
    }
  }
  if (!inside) throw Error(ErrorKind::RayOutsideSupport, "ray " + ray.to_string() + " is outside the support");
  auto fine = std::make_shared<const Fan>(Fan::assemble(f.rank(), std::move(rays), std::move(cones)));
  return SubdivisionMap{std::move(fine), std::move(fan), std::move(assignment)};
}

namespace {

// Pulls the existing ray r: every non-simplicial maximal cone through r is
// replaced by the joins of r with its facets that miss r.
SubdivisionMap pull_ray(FanPtr fan, std::size_t r) {
  const Fan& f = *fan;
  std::vector<RaySet> cones;
  std::vector<std::size_t> assignment;
  for (std::size_t i = 0; i < f.num_maximal(); ++i) {
    const Cone& c = f.maximal_cone(i);
    const RaySet& s = f.maximal_cones()[i];
    auto pos = std::find(s.begin(), s.end(), r);
    if (c.is_simplicial() || pos == s.end()) {
      cones.push_back(s);
      assignment.push_back(i);
      continue;
    }
    const std::size_t local_r = static_cast<std::size_t>(pos - s.begin());
    for (const auto& facet : c.facets()) {
      if (std::binary_search(facet.begin(), facet.end(), local_r)) continue;
      RaySet join{r};
      for (std::size_t local : facet) join.push_back(s[local]);
      std::sort(join.begin(), join.end());
      cones.push_back(std::move(join));
      assignment.push_back(i);
    }
  }
  auto fine = std::make_shared<const Fan>(Fan::assemble(f.rank(), f.rays(), std::move(cones)));
  return SubdivisionMap{std::move(fine), std::move(fan), std::move(assignment)};
}

struct BoxPoint {
  LatticePoint point;
  Integer height;  // Σλ_i scaled by the multiplicity
};

// Nonzero lattice points Σλ_i v_i, 0 <= λ_i < 1, of a simplicial cone.
std::vector<BoxPoint> box_points(const Cone& c) {
  const std::size_t n = c.rank();
  const std::size_t d = c.dim();
  SmithForm g = smith_normal_form(rows_matrix(c.generators(), n));
  // C: generator coordinates in the basis given by the first d rows of V^{-1}.
  IntMatrix coords(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t r = 0; r < n; ++r) coords(i, j) += c.generators()[i][r] * g.v(r, j);
  Integer det = determinant(coords);
  IntMatrix adj(d, d);  // adj(C) with C^{-1} = adj / det
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      IntMatrix minor(d - 1, d - 1);
      for (std::size_t r = 0, mr = 0; r < d; ++r) {
        if (r == j) continue;
        for (std::size_t s = 0, ms = 0; s < d; ++s) {
          if (s == i) continue;
          minor(mr, ms++) = coords(r, s);
        }
        ++mr;
      }
      Integer m = determinant(minor);
      adj(i, j) = ((i + j) % 2 == 0) ? m : Integer(-m);
    }
  if (det < 0) {
    det = -det;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) adj(i, j) = -adj(i, j);
  }

  // Coset representatives of Z^d / Z^d C are z V'^{-1} with 0 <= z_i < d_i.
  SmithForm s = smith_normal_form(coords);
  std::vector<Integer> bounds = s.invariant_factors();
  std::vector<BoxPoint> out;
  std::vector<Integer> z(d);
  for (;;) {
    std::vector<Integer> y(d);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) y[j] += z[i] * s.v_inv(i, j);
    // λ = y C^{-1}; reduce numerators mod det into [0, det).
    std::vector<Integer> frac(d);
    Integer height = 0;
    for (std::size_t j = 0; j < d; ++j) {
      Integer a = 0;
      for (std::size_t i = 0; i < d; ++i) a += y[i] * adj(i, j);
      mpz_fdiv_r(frac[j].get_mpz_t(), a.get_mpz_t(), det.get_mpz_t());
      height += frac[j];
    }
    if (height != 0) {
      LatticePoint p(n);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t r = 0; r < n; ++r) p[r] += frac[i] * c.generators()[i][r];
      for (std::size_t r = 0; r < n; ++r) mpz_divexact(p[r].get_mpz_t(), p[r].get_mpz_t(), det.get_mpz_t());
      out.push_back({std::move(p), height});
    }
    std::size_t i = 0;
    while (i < d) {
      if (++z[i] < bounds[i]) break;
      z[i] = 0;
      ++i;
    }
    if (i == d) break;
  }
  return out;
}

std::vector<Integer> simplicial_multiplicities(const Fan& f) {
  std::vector<Integer> out;
  for (std::size_t i = 0; i < f.num_maximal(); ++i)
    if (f.maximal_cone(i).is_simplicial()) out.push_back(f.maximal_cone(i).multiplicity());
  return out;
}

}  // namespace

SubdivisionMap resolve(FanPtr fan, const ResolveOptions& options, std::vector<ResolutionStep>* trace) {
  std::mt19937_64 rng(options.seed.value_or(0));
  SubdivisionMap total = SubdivisionMap::identity(fan);

  auto apply = [&](const SubdivisionMap& step, const LatticePoint& ray, bool pulling) {
    if (trace)
      trace->push_back({ray, pulling, simplicial_multiplicities(*step.coarse), simplicial_multiplicities(*step.fine)});
    total = compose(step, total);
  };

  // Pulling every ray once triangulates the fan.
  std::vector<std::size_t> order(fan->rays().size());
  std::iota(order.begin(), order.end(), 0);
  if (options.seed) std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t r : order) {
    const Fan& cur = *total.fine;
    bool needed = false;
    for (std::size_t i : cur.maximal_cones_containing({r}))
      if (!cur.maximal_cone(i).is_simplicial()) needed = true;
    if (!needed) continue;
    apply(pull_ray(total.fine, r), cur.rays()[r], true);
  }

  for (;;) {
    const Fan& cur = *total.fine;
    std::vector<std::size_t> singular;
    for (std::size_t i = 0; i < cur.num_maximal(); ++i)
      if (cur.maximal_cone(i).multiplicity() > 1) singular.push_back(i);
    if (singular.empty()) break;

    std::size_t pick = singular.front();
    if (options.seed) {
      pick = singular[std::uniform_int_distribution<std::size_t>(0, singular.size() - 1)(rng)];
    } else {
      for (std::size_t i : singular) {
        int c = cmp(cur.maximal_cone(i).multiplicity(), cur.maximal_cone(pick).multiplicity());
        if (c > 0 || (c == 0 && cur.maximal_cones()[i] < cur.maximal_cones()[pick])) pick = i;
      }
    }
    std::vector<BoxPoint> box = box_points(cur.maximal_cone(pick));
    LatticePoint ray;
    if (options.seed) {
      ray = primitive_generator(box[std::uniform_int_distribution<std::size_t>(0, box.size() - 1)(rng)].point);
    } else {
      const BoxPoint* best = &box.front();
      for (const auto& b : box) {
        int c = cmp(b.height, best->height);
        if (c < 0 || (c == 0 && b.point < best->point)) best = &b;
      }
      ray = best->point;
    }

    SubdivisionMap step = stellar_subdivision(total.fine, ray);
    for (std::size_t i = 0; i < step.fine->num_maximal(); ++i) {
      std::size_t parent = step.assignment[i];
      if (step.fine->maximal_cones()[i] == cur.maximal_cones()[parent]) continue;
      if (step.fine->maximal_cone(i).multiplicity() >= cur.maximal_cone(parent).multiplicity())
        throw std::logic_error("resolution step did not lower multiplicity at " + ray.to_string());
    }
    apply(step, ray, false);
  }
  return total;
}

}  // namespace pexp
