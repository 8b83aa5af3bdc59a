#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "corpus.hpp"
#include "pexp/error.hpp"
#include "pexp/fan.hpp"

using namespace pexp;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

bool all_smooth(const Fan& f) {
  for (std::size_t i = 0; i < f.num_maximal(); ++i)
    if (!f.maximal_cone(i).is_smooth()) return false;
  return true;
}

// Every fine cone sits inside its assigned coarse cone, and random lattice
// points of each coarse cone land in some fine cone assigned to it.
void check_refinement(const SubdivisionMap& s, std::mt19937_64& rng) {
  const Fan& fine = *s.fine;
  const Fan& coarse = *s.coarse;
  REQUIRE(s.assignment.size() == fine.num_maximal());
  for (std::size_t i = 0; i < fine.num_maximal(); ++i)
    for (const auto& g : fine.maximal_cone(i).generators()) REQUIRE(coarse.maximal_cone(s.assignment[i]).contains(g));
  std::uniform_int_distribution<long> coef(0, 4);
  for (std::size_t p = 0; p < coarse.num_maximal(); ++p) {
    const Cone& c = coarse.maximal_cone(p);
    for (int trial = 0; trial < 20; ++trial) {
      LatticePoint x(coarse.rank());
      for (const auto& g : c.generators()) x += Integer(coef(rng)) * g;
      bool covered = false;
      for (std::size_t i = 0; i < fine.num_maximal() && !covered; ++i)
        covered = s.assignment[i] == p && fine.maximal_cone(i).contains(x);
      REQUIRE(covered);
    }
  }
}

// Angle (rank 2) or solid angle (rank 3) of a full-dimensional cone, in
// floating point. Non-simplicial 3d cones are coned off from a generator.
double cone_angle(const Cone& c) {
  auto vec = [](const LatticePoint& v) {
    std::vector<double> x;
    for (const auto& a : v.coords()) x.push_back(a.get_d());
    return x;
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  auto norm = [&](const std::vector<double>& a) { return std::sqrt(dot(a, a)); };
  if (c.dim() < c.rank()) return 0;
  const auto& g = c.generators();
  if (c.rank() == 2) {
    auto a = vec(g[0]), b = vec(g[1]);
    return std::acos(std::clamp(dot(a, b) / (norm(a) * norm(b)), -1.0, 1.0));
  }
  auto simplex = [&](const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& d) {
    const double triple = a[0] * (b[1] * d[2] - b[2] * d[1]) - a[1] * (b[0] * d[2] - b[2] * d[0]) +
                          a[2] * (b[0] * d[1] - b[1] * d[0]);
    const double den = norm(a) * norm(b) * norm(d) + dot(a, b) * norm(d) + dot(a, d) * norm(b) + dot(b, d) * norm(a);
    return 2 * std::atan2(std::abs(triple), den);
  };
  if (g.size() == 3) return simplex(vec(g[0]), vec(g[1]), vec(g[2]));
  double total = 0;
  for (const auto& facet : c.facets()) {
    if (std::find(facet.begin(), facet.end(), 0) != facet.end()) continue;
    REQUIRE(facet.size() == 2);
    total += simplex(vec(g[0]), vec(g[facet[0]]), vec(g[facet[1]]));
  }
  return total;
}

double support_angle(const Fan& f) {
  double total = 0;
  for (std::size_t i = 0; i < f.num_maximal(); ++i) total += cone_angle(f.maximal_cone(i));
  return total;
}

}  // namespace

TEST_CASE("cone validation") {
  CHECK(kind_of([] { Cone::from_generators(2, {{1, 0}, {-1, 0}}); }) == ErrorKind::NotStronglyConvex);
  CHECK(kind_of([] { Cone::from_generators(2, {{1, 0}, {0, 1}, {1, 1}}); }) == ErrorKind::RedundantGenerator);
  CHECK(kind_of([] { Cone::from_generators(2, {{2, 0}}); }) == ErrorKind::NonPrimitiveRay);
  CHECK(kind_of([] { Cone::from_generators(2, {{1, 0}, {1, 0}}); }) == ErrorKind::DuplicateRay);
  CHECK(kind_of([] { Cone::from_generators(2, {{0, 0}}); }) == ErrorKind::ZeroVector);
  CHECK(kind_of([] { Cone::from_generators(2, {{1, 0, 0}}); }) == ErrorKind::RankMismatch);

  Cone sq = Cone::from_generators(3, {{1, 0, 1}, {0, 1, 1}, {-1, 0, 1}, {0, -1, 1}});
  CHECK(sq.dim() == 3);
  CHECK(!sq.is_simplicial());
  CHECK(sq.facets().size() == 4);
  CHECK(sq.contains({0, 0, 1}));
  CHECK(sq.relative_interior_contains({0, 0, 1}));
  CHECK(!sq.relative_interior_contains({1, 0, 1}));
  CHECK(!sq.contains({0, 0, -1}));
  CHECK(kind_of([&] { sq.multiplicity(); }) == ErrorKind::NotSimplicial);
  // {}, 4 rays, 4 two-dimensional faces and the cone itself
  CHECK(sq.faces().size() == 10);

  Cone h = Cone::hull(2, {{1, 0}, {0, 1}, {1, 1}, {2, 2}});
  CHECK(h.generators().size() == 2);
}

TEST_CASE("multiplicity") {
  CHECK(multiplicity(Cone::from_generators(2, {{1, 0}, {0, 1}})) == 1);
  CHECK(multiplicity(Cone::from_generators(2, {{1, 0}, {-1, -2}})) == 2);
  CHECK(multiplicity(Cone::from_generators(2, {{0, 1}, {-1, -2}})) == 1);
  CHECK(multiplicity(Cone::from_generators(3, {{1, 0, 0}, {0, 1, 0}, {1, 1, 3}})) == 3);
  // lower-dimensional: index inside its own span
  CHECK(multiplicity(Cone::from_generators(3, {{1, 0, 0}, {1, 2, 0}})) == 2);
  CHECK(multiplicity(Cone::from_generators(3, {{1, 1, 0}})) == 1);
}

TEST_CASE("build fan") {
  FanPtr p112 = corpus::p112();
  CHECK(p112->num_maximal() == 3);
  CHECK(p112->num_cones() == 7);
  CHECK(corpus::p1()->num_maximal() == 2);

  // The listed example has ⟨e1, -e1⟩ as a cone, which already fails strong
  // convexity before any overlap check.
  CHECK(kind_of([] { Fan::build(2, {{1, 0}, {-1, 0}, {1, 1}}, {{0, 2}, {1, 2}, {0, 1}}); }) ==
        ErrorKind::NotStronglyConvex);
  // Overlapping 2-dimensional cones.
  CHECK(kind_of([] { Fan::build(2, {{1, 0}, {0, 1}, {1, 1}}, {{0, 1}, {0, 2}}); }) == ErrorKind::NotAFan);
  // A maximal cone listed as a face of another.
  CHECK(kind_of([] { Fan::build(2, {{1, 0}, {0, 1}}, {{0, 1}, {0}}); }) == ErrorKind::NotAFan);
  CHECK(kind_of([] { Fan::build(2, {{1, 0}, {0, 1}}, {{0, 1}, {0, 1}}); }) == ErrorKind::NotAFan);
  CHECK(kind_of([] { Fan::build(2, {{1, 0}, {2, 0}}, {{0}}); }) == ErrorKind::NonPrimitiveRay);
  CHECK(kind_of([] { Fan::build(2, {{1, 0}, {1, 0}}, {{0}}); }) == ErrorKind::DuplicateRay);
  // Two 3-cones meeting in a non-face: they share a ray of one but cross.
  CHECK(kind_of([] {
          Fan::build(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, -1}, {-1, -1, 1}, {1, 1, 1}},
                     {{0, 1, 2}, {0, 1, 5}});
        }) == ErrorKind::NotAFan);

  for (const auto& [name, fan] : corpus::complete_fans()) {
    CAPTURE(name);
    // face closure: every face of every cone is a cone of the fan
    for (std::size_t id = 0; id < fan->num_cones(); ++id) {
      const RaySet& s = fan->cone_set(id);
      for (const auto& local : fan->cone(id).faces()) {
        RaySet face;
        for (std::size_t k : local) face.push_back(s[k]);
        REQUIRE(fan->find_cone(face));
      }
    }
  }
}

TEST_CASE("completeness") {
  CHECK(is_complete(*corpus::p112()));
  CHECK(is_complete(*corpus::p1()));
  CHECK(!is_complete(*corpus::make(2, {{1, 0}, {0, 1}}, {{0, 1}})));
  CHECK(!is_complete(*corpus::make(2, {{1, 0}, {0, 1}, {-1, -1}}, {{0, 1}, {0, 2}})));
  for (const auto& [name, fan] : corpus::complete_fans()) {
    CAPTURE(name);
    CHECK(is_complete(*fan));
  }
  CHECK(!is_complete(*corpus::mult3_cone()));
}

TEST_CASE("completeness agrees with the measure of the support") {
  std::vector<FanPtr> fans = {corpus::make(2, {{1, 0}, {0, 1}}, {{0, 1}}),
                              corpus::make(2, {{1, 0}, {0, 1}, {-1, -1}}, {{0, 1}, {0, 2}}), corpus::mult3_cone()};
  for (const auto& [name, fan] : corpus::complete_fans())
    if (fan->rank() >= 2) fans.push_back(fan);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> coord(-3, 3);
  for (std::size_t k = 0, n = fans.size(); k < n; ++k)
    for (int t = 0; t < 3; ++t) {
      LatticePoint x(fans[k]->rank());
      for (std::size_t j = 0; j < x.rank(); ++j) x[j] = coord(rng);
      if (x.is_zero()) continue;
      x = primitive_generator(x);
      bool inside = false;
      for (std::size_t i = 0; i < fans[k]->num_maximal(); ++i) inside = inside || fans[k]->maximal_cone(i).contains(x);
      if (inside) fans.push_back(stellar_subdivision(fans[k], x).fine);
    }
  for (const auto& fan : fans) {
    const double full = fan->rank() == 2 ? 2 * M_PI : 4 * M_PI;
    const bool by_measure = std::abs(support_angle(*fan) - full) < 1e-9;
    CHECK(is_complete(*fan) == by_measure);
  }
}

TEST_CASE("star quotient") {
  FanPtr p112 = corpus::p112();
  StarQuotient s = star_quotient(*p112, {2});
  CHECK(s.fan.rank() == 1);
  CHECK(s.fan.rays().size() == 2);
  CHECK(s.fan.num_maximal() == 2);
  CHECK(is_complete(s.fan));

  StarQuotient whole = star_quotient(*p112, {});
  CHECK(whole.fan.rank() == 2);
  CHECK(whole.fan.num_maximal() == 3);
  CHECK(is_complete(whole.fan));

  StarQuotient top = star_quotient(*p112, {0, 1});
  CHECK(top.fan.rank() == 0);
  CHECK(top.fan.num_maximal() == 1);

  // (1,0,1) lies on the square cone and two of the smooth cones.
  StarQuotient ps = star_quotient(*corpus::pyramid(), {1});
  CHECK(ps.fan.rank() == 2);
  CHECK(ps.fan.num_maximal() == 3);
  CHECK(is_complete(ps.fan));
  CHECK(kind_of([&] { star_quotient(*p112, {0, 1, 2}); }) == ErrorKind::ConeNotInFan);
}

TEST_CASE("stellar subdivision") {
  FanPtr a2 = corpus::make(2, {{1, 0}, {0, 1}}, {{0, 1}});
  SubdivisionMap b = stellar_subdivision(a2, {1, 1});
  CHECK(b.fine->num_maximal() == 2);
  CHECK(all_smooth(*b.fine));
  CHECK(b.fine->maximal_cones() == std::vector<RaySet>{{0, 2}, {1, 2}});

  FanPtr p112 = corpus::p112();
  SubdivisionMap r = stellar_subdivision(p112, {0, -1});
  CHECK(r.fine->num_maximal() == 4);
  CHECK(all_smooth(*r.fine));
  CHECK(is_complete(*r.fine));

  SubdivisionMap same = stellar_subdivision(p112, {0, 1});
  CHECK(*same.fine == *p112);
  CHECK(same.assignment == std::vector<std::size_t>{0, 1, 2});

  CHECK(kind_of([&] { stellar_subdivision(a2, {-1, 0}); }) == ErrorKind::RayOutsideSupport);
  CHECK(kind_of([&] { stellar_subdivision(a2, {2, 2}); }) == ErrorKind::NonPrimitiveRay);

  // Blowing up a fixed point of P^2.
  FanPtr p2 = corpus::p2();
  SubdivisionMap w = stellar_subdivision(p2, {1, 1});
  CHECK(w.fine->num_maximal() == 4);
  std::mt19937_64 rng(3);
  check_refinement(w, rng);
  CHECK(is_complete(*w.fine));

  // (0,1,0) lies on the wall shared by two smooth cones of the pyramid fan.
  SubdivisionMap pw = stellar_subdivision(corpus::pyramid(), {0, 1, 0});
  CHECK(pw.fine->num_maximal() == 7);
  CHECK(is_complete(*pw.fine));
  check_refinement(pw, rng);
}

TEST_CASE("resolve examples") {
  SubdivisionMap id = resolve(corpus::p2());
  CHECK(*id.fine == *corpus::p2());

  SubdivisionMap r = resolve(corpus::p112());
  CHECK(all_smooth(*r.fine));
  CHECK(r.fine->rays().size() == 4);
  CHECK(r.fine->ray_index({0, -1}));

  std::vector<ResolutionStep> trace;
  SubdivisionMap m2 = resolve(corpus::mult2_cone(), {}, &trace);
  CHECK(all_smooth(*m2.fine));
  CHECK(m2.fine->num_maximal() == 2);
  REQUIRE(trace.size() == 1);
  CHECK(trace[0].ray == LatticePoint{1, 1});

  trace.clear();
  SubdivisionMap m3 = resolve(corpus::mult3_cone(), {}, &trace);
  CHECK(all_smooth(*m3.fine));
  REQUIRE(!trace.empty());
  CHECK(trace[0].ray == LatticePoint{1, 1, 2});
  std::vector<Integer> after = trace[0].multiplicities_after;
  std::sort(after.begin(), after.end());
  CHECK(after == std::vector<Integer>{1, 1, 2});

  SubdivisionMap py = resolve(corpus::pyramid());
  CHECK(all_smooth(*py.fine));
  CHECK(is_complete(*py.fine));
}

TEST_CASE("resolution invariants across seeds") {
  std::mt19937_64 rng(99);
  std::vector<FanPtr> fans = {corpus::p112(), corpus::pyramid(), corpus::mult2_cone(), corpus::mult3_cone(),
                              corpus::make(2, {{1, 0}, {-3, 7}}, {{0, 1}}),
                              corpus::make(3, {{1, 0, 0}, {0, 1, 0}, {1, 2, 5}}, {{0, 1, 2}})};
  for (const auto& fan : fans) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      std::vector<ResolutionStep> trace;
      SubdivisionMap r = resolve(fan, {seed}, &trace);
      REQUIRE(all_smooth(*r.fine));
      REQUIRE(is_complete(*r.fine) == is_complete(*fan));
      check_refinement(r, rng);
      for (const auto& step : trace) {
        if (step.simplicial_pass) continue;
        // Multiset certificate: removed cones are replaced by cones of
        // strictly smaller multiplicity, so the sorted multiset drops.
        std::vector<Integer> before = step.multiplicities_before, after = step.multiplicities_after;
        std::sort(before.rbegin(), before.rend());
        std::sort(after.rbegin(), after.rend());
        REQUIRE(std::lexicographical_compare(after.begin(), after.end(), before.begin(), before.end()));
      }
    }
  }
}
