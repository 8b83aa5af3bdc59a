#include "pexp/pexp.hpp"

#include <algorithm>
#include <string>

namespace pexp {

struct PExpAccess {
  static PExpFun make(FanPtr fan, std::vector<LaurentPoly> values) { return PExpFun(std::move(fan), std::move(values)); }
};

namespace {

std::string cone_name(const Fan& fan, std::size_t maximal) {
  std::string s = "cone " + std::to_string(maximal) + " {";
  const RaySet& r = fan.maximal_cones()[maximal];
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s + "}";
}

std::string set_name(const RaySet& r) {
  std::string s = "{";
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
  return s + "}";
}

const QuotientLattice& maximal_quotient(const Fan& fan, std::size_t i) {
  return fan.quotient(fan.maximal_cone_id(i));
}

void require_same_fan(const FanPtr& a, const FanPtr& b, const char* what) {
  if (!same_fan(a, b)) throw Error(ErrorKind::FanMismatch, what);
}

}  // namespace

bool same_fan(const FanPtr& a, const FanPtr& b) { return a == b || (a && b && *a == *b); }

IntMatrix quotient_map(const QuotientLattice& from, const QuotientLattice& to) {
  return to.projection() * from.section();
}

PExpFun PExpFun::constant(FanPtr fan, const LaurentPoly& global) {
  if (global.rank() != fan->rank())
    throw Error(ErrorKind::RankMismatch, "global class of rank " + std::to_string(global.rank()));
  std::vector<LaurentPoly> values;
  for (std::size_t i = 0; i < fan->num_maximal(); ++i)
    values.push_back(map_exponents(global, maximal_quotient(*fan, i).projection()));
  return PExpFun(std::move(fan), std::move(values));
}

PExpFun PExpFun::one(FanPtr fan) {
  const std::size_t n = fan->rank();
  return constant(std::move(fan), LaurentPoly::constant(n, 1));
}

PExpFun operator+(const PExpFun& a, const PExpFun& b) {
  require_same_fan(a.fan_, b.fan_, "adding functions on different fans");
  std::vector<LaurentPoly> v = a.values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
  return PExpFun(a.fan_, std::move(v));
}

PExpFun operator-(const PExpFun& a, const PExpFun& b) {
  require_same_fan(a.fan_, b.fan_, "subtracting functions on different fans");
  std::vector<LaurentPoly> v = a.values_;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values_[i];
  return PExpFun(a.fan_, std::move(v));
}

PExpFun operator*(const PExpFun& a, const PExpFun& b) {
  require_same_fan(a.fan_, b.fan_, "multiplying functions on different fans");
  std::vector<LaurentPoly> v;
  v.reserve(a.values_.size());
  for (std::size_t i = 0; i < a.values_.size(); ++i) v.push_back(a.values_[i] * b.values_[i]);
  return PExpFun(a.fan_, std::move(v));
}

PExpFun operator*(const LaurentPoly& c, const PExpFun& f) {
  if (c.rank() != f.fan_->rank())
    throw Error(ErrorKind::RankMismatch, "scalar of rank " + std::to_string(c.rank()));
  std::vector<LaurentPoly> v;
  v.reserve(f.values_.size());
  for (std::size_t i = 0; i < f.values_.size(); ++i)
    v.push_back(map_exponents(c, maximal_quotient(*f.fan_, i).projection()) * f.values_[i]);
  return PExpFun(f.fan_, std::move(v));
}

PExpFun PExpFun::operator-() const {
  std::vector<LaurentPoly> v;
  for (const auto& x : values_) v.push_back(-x);
  return PExpFun(fan_, std::move(v));
}

bool operator==(const PExpFun& a, const PExpFun& b) { return same_fan(a.fan_, b.fan_) && a.values_ == b.values_; }

GkmReport gkm_validate(FanPtr fan, std::vector<LaurentPoly> values) {
  const Fan& f = *fan;
  if (values.size() != f.num_maximal())
    throw Error(ErrorKind::InvalidArgument, std::to_string(values.size()) + " values for " +
                                                std::to_string(f.num_maximal()) + " maximal cones");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].rank() != maximal_quotient(f, i).rank())
      throw Error(ErrorKind::RankMismatch, "value on " + cone_name(f, i) + " has rank " +
                                               std::to_string(values[i].rank()) + ", expected " +
                                               std::to_string(maximal_quotient(f, i).rank()));
  GkmReport report;
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const RaySet& a = f.maximal_cones()[i];
      const RaySet& b = f.maximal_cones()[j];
      RaySet common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      const std::size_t face = f.cone_id(common);
      LaurentPoly ra = map_exponents(values[i], quotient_map(maximal_quotient(f, i), f.quotient(face)));
      LaurentPoly rb = map_exponents(values[j], quotient_map(maximal_quotient(f, j), f.quotient(face)));
      if (ra != rb) report.violations.push_back({i, j, std::move(common), std::move(ra), std::move(rb)});
    }
  if (report.ok()) report.function = PExpAccess::make(std::move(fan), std::move(values));
  return report;
}

PExpFun make_pexp(FanPtr fan, std::vector<LaurentPoly> values) {
  const FanPtr keep = fan;
  GkmReport r = gkm_validate(std::move(fan), std::move(values));
  if (!r.ok()) {
    const auto& v = r.violations.front();
    throw Error(ErrorKind::GkmViolation, cone_name(*keep, v.first) + " and " + cone_name(*keep, v.second) +
                                             " disagree on face " + set_name(v.face) + ": " +
                                             v.first_restricted.to_string() + " vs " +
                                             v.second_restricted.to_string());
  }
  return std::move(*r.function);
}

LaurentPoly restrict(const PExpFun& f, const RaySet& tau) {
  const Fan& fan = *f.fan();
  const std::size_t id = fan.cone_id(tau);
  std::vector<std::size_t> owners = fan.maximal_cones_containing(fan.cone_set(id));
  const std::size_t i = owners.front();
  return map_exponents(f.value(i), quotient_map(maximal_quotient(fan, i), fan.quotient(id)));
}

PExpFun from_cartier(FanPtr fan, const CartierData& data) {
  const Fan& f = *fan;
  if (data.m.size() != f.num_maximal())
    throw Error(ErrorKind::InvalidArgument, std::to_string(data.m.size()) + " characters for " +
                                                std::to_string(f.num_maximal()) + " maximal cones");
  for (const auto& m : data.m)
    if (m.rank() != f.rank()) throw Error(ErrorKind::RankMismatch, "Cartier character " + m.to_string());
  for (std::size_t i = 0; i < data.m.size(); ++i)
    for (std::size_t j = i + 1; j < data.m.size(); ++j) {
      const RaySet& a = f.maximal_cones()[i];
      const RaySet& b = f.maximal_cones()[j];
      RaySet common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      Character diff = data.m[i] - data.m[j];
      for (std::size_t r : common)
        if (pairing(diff, f.rays()[r]) != 0)
          throw Error(ErrorKind::IncompatibleCartierData, "m on " + cone_name(f, i) + " and " + cone_name(f, j) +
                                                              " differ on ray " + std::to_string(r));
    }
  std::vector<LaurentPoly> values;
  for (std::size_t i = 0; i < data.m.size(); ++i)
    values.push_back(LaurentPoly::monomial(maximal_quotient(f, i).project(data.m[i])));
  return PExpAccess::make(std::move(fan), std::move(values));
}

PExpFun pullback(const PExpFun& f, const SubdivisionMap& s) {
  require_same_fan(f.fan(), s.coarse, "pullback along a subdivision of a different fan");
  const Fan& fine = *s.fine;
  const Fan& coarse = *s.coarse;
  std::vector<LaurentPoly> values;
  for (std::size_t i = 0; i < fine.num_maximal(); ++i) {
    const std::size_t p = s.assignment[i];
    values.push_back(
        map_exponents(f.value(p), quotient_map(maximal_quotient(coarse, p), maximal_quotient(fine, i))));
  }
  return PExpAccess::make(s.fine, std::move(values));
}

PExpFun descend(const PExpFun& g, const SubdivisionMap& s) {
  require_same_fan(g.fan(), s.fine, "descent of a function on a different fan");
  const Fan& fine = *s.fine;
  const Fan& coarse = *s.coarse;
  std::vector<std::optional<std::pair<std::size_t, LaurentPoly>>> chosen(coarse.num_maximal());
  for (std::size_t i = 0; i < fine.num_maximal(); ++i) {
    const std::size_t p = s.assignment[i];
    LaurentPoly v =
        map_exponents(g.value(i), quotient_map(maximal_quotient(fine, i), maximal_quotient(coarse, p)));
    if (!chosen[p]) {
      chosen[p].emplace(i, std::move(v));
    } else if (chosen[p]->second != v) {
      throw NotDescendable(p, chosen[p]->first, i, chosen[p]->second, v,
                           "coarse " + cone_name(coarse, p) + ": fine cones " + std::to_string(chosen[p]->first) +
                               " and " + std::to_string(i) + " carry " + chosen[p]->second.to_string() + " and " +
                               v.to_string());
    }
  }
  std::vector<LaurentPoly> values;
  for (std::size_t p = 0; p < coarse.num_maximal(); ++p) {
    if (!chosen[p]) throw Error(ErrorKind::InvalidArgument, "coarse " + cone_name(coarse, p) + " has no fine cones");
    values.push_back(std::move(chosen[p]->second));
  }
  return make_pexp(s.coarse, std::move(values));
}

}  // namespace pexp
