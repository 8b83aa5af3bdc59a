#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "corpus.hpp"
#include "pexp/error.hpp"
#include "pexp/pexp.hpp"

using namespace pexp;
using corpus::e;
using corpus::one;
using corpus::poly;
using corpus::random_function;
using corpus::random_small;

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

LatticePoint random_support_point(const Fan& fan, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, fan.num_maximal() - 1);
  std::uniform_int_distribution<long> coef(0, 3);
  for (;;) {
    const Cone& c = fan.maximal_cone(pick(rng));
    LatticePoint x(fan.rank());
    for (const auto& g : c.generators()) x += Integer(coef(rng)) * g;
    if (!x.is_zero()) return primitive_generator(x);
  }
}

}  // namespace

TEST_CASE("the P(1,1,2) example functions satisfy GKM") {
  corpus::P112Example ex;
  for (const auto* values : {&ex.xi, &ex.ox, &ex.od, &ex.op}) {
    GkmReport r = gkm_validate(ex.fan, *values);
    CHECK(r.ok());
    CHECK(r.function.has_value());
  }
  std::vector<LaurentPoly> bad = ex.xi;
  bad[1] = poly(2, {{1, {0, 0}}, {1, {1, -2}}});
  GkmReport r = gkm_validate(ex.fan, bad);
  CHECK(!r.ok());
  CHECK(kind_of([&] { make_pexp(ex.fan, bad); }) == ErrorKind::GkmViolation);
  CHECK(kind_of([&] { gkm_validate(ex.fan, {one(2)}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { gkm_validate(ex.fan, {one(2), one(2), one(3)}); }) == ErrorKind::RankMismatch);
}

TEST_CASE("GKM violation on P2") {
  FanPtr p2 = corpus::p2();
  // cones {0,1}, {0,2}, {1,2}; {0,1} and {1,2} share the ray e2
  GkmReport r = gkm_validate(p2, {one(2), one(2), e({0, 1})});
  REQUIRE(!r.ok());
  bool found = false;
  for (const auto& v : r.violations)
    if (v.face == RaySet{1}) {
      found = true;
      CHECK(v.first == 0);
      CHECK(v.second == 2);
      CHECK(v.first_restricted == one(1));
      CHECK(v.second_restricted == e(Character{1}));
    }
  CHECK(found);
}

TEST_CASE("restriction") {
  corpus::P112Example ex;
  PExpFun xi = make_pexp(ex.fan, ex.xi);
  CHECK(restrict(xi, {2}) == one(1) + e(Character{1}));
  CHECK(restrict(xi, {}) == LaurentPoly::constant(0, 2));
  CHECK(restrict(xi, {0, 1}) == poly(2, {{1, {1, 0}}, {1, {0, 1}}}));
  CHECK(kind_of([&] { restrict(xi, {0, 1, 2}); }) == ErrorKind::ConeNotInFan);
  // each ray restriction agrees from both sides
  for (std::size_t r = 0; r < 3; ++r) {
    const auto owners = ex.fan->maximal_cones_containing({r});
    REQUIRE(owners.size() == 2);
  }
}

TEST_CASE("ring operations") {
  corpus::P112Example ex;
  PExpFun od = make_pexp(ex.fan, ex.od);
  PExpFun ox = make_pexp(ex.fan, ex.ox);
  CHECK(od * ox == od);
  CHECK(PExpFun::one(ex.fan) * od == od);
  CHECK(ox == PExpFun::one(ex.fan));
  PExpFun eu = e({1, 0}) * PExpFun::one(ex.fan);
  CHECK(eu == PExpFun::constant(ex.fan, e({1, 0})));
  CHECK((od - od) == PExpFun::constant(ex.fan, LaurentPoly(2)));
  CHECK(-(-od) == od);
  CHECK(kind_of([&] { od + PExpFun::one(corpus::p2()); }) == ErrorKind::FanMismatch);
}

TEST_CASE("lower-dimensional maximal cones") {
  // rays e1, e2, -e1; the ray -e1 is a maximal cone on its own
  FanPtr f = corpus::make(2, {{1, 0}, {0, 1}, {-1, 0}}, {{0, 1}, {2}});
  PExpFun c = PExpFun::constant(f, e({1, 0}));
  CHECK(c.value(1) == e(Character{-1}));
  CHECK(restrict(c, {}) == LaurentPoly::constant(0, 1));
  CHECK(gkm_validate(f, {one(2), e(Character{5})}).ok());
  CHECK(!gkm_validate(f, {one(2), e(Character{5}) + e(Character{1})}).ok());
}

TEST_CASE("from cartier") {
  FanPtr p112 = corpus::p112();
  CHECK(from_cartier(p112, {{{0, 0}, {0, 0}, {0, 0}}}) == PExpFun::one(p112));
  CHECK(from_cartier(p112, {{{1, 0}, {1, 0}, {1, 0}}}) == PExpFun::constant(p112, e({1, 0})));
  FanPtr p1 = corpus::p1();
  PExpFun l = from_cartier(p1, {{{0}, {1}}});
  CHECK(l.value(0) == one(1));
  CHECK(l.value(1) == e(Character{1}));
  CHECK(kind_of([] { from_cartier(corpus::p2(), {{{1, 0}, {0, 0}, {0, 0}}}); }) ==
        ErrorKind::IncompatibleCartierData);
  // every Cartier class satisfies GKM
  std::mt19937_64 rng(5);
  for (const auto& [name, fan] : corpus::complete_fans()) {
    CAPTURE(name);
    for (int t = 0; t < 10; ++t) {
      std::optional<CartierData> d = corpus::random_cartier(*fan, rng);
      REQUIRE(d);
      PExpFun g = from_cartier(fan, *d);
      REQUIRE(gkm_validate(fan, g.values()).ok());
    }
  }
}

TEST_CASE("pullback") {
  corpus::P112Example ex;
  PExpFun xi = make_pexp(ex.fan, ex.xi);
  SubdivisionMap s = stellar_subdivision(ex.fan, {0, -1});
  PExpFun g = pullback(xi, s);
  REQUIRE(g.values().size() == 4);
  int carrying = 0;
  for (std::size_t i = 0; i < 4; ++i)
    if (s.assignment[i] == 1) {
      CHECK(g.value(i) == poly(2, {{1, {0, 0}}, {1, {1, -1}}}));
      ++carrying;
    }
  CHECK(carrying == 2);
  CHECK(gkm_validate(s.fine, g.values()).ok());
  CHECK(pullback(xi, SubdivisionMap::identity(ex.fan)) == xi);
  CHECK(pullback(PExpFun::one(ex.fan), s) == PExpFun::one(s.fine));
}

TEST_CASE("descend") {
  FanPtr a2 = corpus::make(2, {{1, 0}, {0, 1}}, {{0, 1}});
  SubdivisionMap s = stellar_subdivision(a2, {1, 1});
  // fine cones {0,2} = ⟨e1, e1+e2⟩ and {1,2} = ⟨e2, e1+e2⟩
  PExpFun w = make_pexp(s.fine, {one(2) + e({1, 2}), one(2) + e({2, 1})});
  try {
    descend(w, s);
    FAIL("expected NotDescendable");
  } catch (const NotDescendable& nd) {
    CHECK(nd.coarse_cone == 0);
    CHECK(nd.fine_a == 0);
    CHECK(nd.fine_b == 1);
    CHECK(nd.value_a == one(2) + e({1, 2}));
    CHECK(nd.value_b == one(2) + e({2, 1}));
  }
  PExpFun c = PExpFun::constant(s.fine, e({3, -1}));
  CHECK(descend(c, s) == PExpFun::constant(a2, e({3, -1})));
  CHECK(kind_of([&] { descend(PExpFun::one(a2), s); }) == ErrorKind::FanMismatch);
}

TEST_CASE("descend after pullback on 100+ random instances") {
  std::mt19937_64 rng(2024);
  std::vector<FanPtr> fans = {corpus::p112(), corpus::p2(), corpus::hirzebruch2(), corpus::pyramid(),
                              corpus::mult2_cone(), corpus::mult3_cone()};
  int instances = 0;
  for (int round = 0; round < 20; ++round)
    for (const auto& fan : fans) {
      SubdivisionMap s = (round % 2 == 0) ? resolve(fan, {std::uint64_t(round)})
                                          : stellar_subdivision(fan, random_support_point(*fan, rng));
      PExpFun f = random_function(fan, rng);
      PExpFun g = pullback(f, s);
      REQUIRE(gkm_validate(s.fine, g.values()).ok());
      REQUIRE(descend(g, s) == f);
      ++instances;
    }
  CHECK(instances >= 100);
}
