#include "circdiff/denjoy.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace circdiff;
using circdiff::testing::golden;

namespace {
double dbl(const Real& v) { return static_cast<double>(v); }

DenjoyBuild small_fixture(long n_trunc = 40, const char* total = "0.5") {
  DenjoySpec spec;
  spec.alpha = AlphaRep::golden();
  spec.total = Real(total);
  spec.n_trunc = n_trunc;
  return build_denjoy(spec);
}
}  // namespace

TEST_CASE("denjoy build bookkeeping") {
  DenjoyBuild b = small_fixture();
  CHECK(b.intervals.size() == 81);
  CHECK(dbl(abs(b.inserted_mass - Real("0.5"))) < 1e-30);

  // l(f(A_n)) = l_{n+1} exactly for n < n_trunc
  std::map<long, Real> lens;
  for (const auto& [n, arc] : b.intervals) lens[n] = arc.length();
  for (const auto& [n, arc] : b.intervals) {
    if (n == 40) continue;
    CircleArc img(b.map.eval(arc.left), b.map.eval(arc.right));
    CHECK(dbl(abs(img.length() - lens[n + 1])) < 1e-35);
  }

  // C1 map, rotation estimate brackets alpha
  CHECK(b.map.breakpoints().empty());
  CHECK(static_cast<int>(b.map.smoothness()) >= static_cast<int>(Smoothness::C1));
  RotationInterval iv = estimate_rotation_number(b.map, 1000);
  CHECK(iv.contains(golden()));

  // inserted intervals are pairwise disjoint
  std::vector<CircleArc> arcs;
  for (const auto& [n, arc] : b.intervals) arcs.push_back(arc);
  CHECK(pairwise_disjoint(arcs));

  // mass overflow guard
  DenjoySpec bad;
  bad.alpha = AlphaRep::golden();
  bad.total = Real("1.2");
  bad.n_trunc = 10;
  CHECK_THROWS_AS((void)build_denjoy(bad), Error);

  // tiny total: C0-close to the rotation
  DenjoyBuild thin = small_fixture(20, "0.01");
  Real worst(0);
  CircleDiffeo rot = rotation_map(golden());
  for (int t = 0; t <= 128; ++t) {
    Real x = Real(t) / 128;
    worst = (std::max)(worst, circle_dist(thin.map.eval(x), rot.eval(x)));
  }
  CHECK(dbl(worst) < 0.02);
}

TEST_CASE("near-identity factors") {
  // a unit map 0.5 away from the identity needs at least ceil(log1.5/log1.1)
  // factors at eps = 0.1
  DerivProfile p({Real(0), Real("0.5"), Real(1)},
                 {Real("0.6"), Real("1.8"), Real("0.6")}, Real(0));
  Real tot = profile_integral(p.nodes(), p.dvals());
  std::vector<Real> d;
  for (const auto& v : p.dvals()) d.push_back(v / tot);
  UnitDiffeo whole = unit_from_profile(DerivProfile(p.nodes(), d, Real(0)));
  Real dist = unit_c1_from_identity(whole).max();
  REQUIRE(dbl(dist) > 0.45);

  auto factors = near_identity_factors(whole, Real("0.1"));
  CHECK(factors.size() >= 5);
  Real x("0.3");
  Real composed = x;
  for (const auto& g : factors) {
    CHECK(dbl(unit_c1_from_identity(g, 96).max()) < 0.1 + 1e-12);
    composed = g.eval(composed);
  }
  CHECK(dbl(abs(composed - whole.eval(x))) < 1e-9);
}

TEST_CASE("fragment sequence") {
  // all identities stay identities
  UnitSeq ids;
  ids.lo = -3;
  ids.maps.assign(7, unit_identity());
  FragmentReport rep;
  UnitSeq g = fragment_sequence(ids, Real("0.1"), &rep);
  for (long i = g.lo; i <= g.hi(); ++i)
    CHECK(unit_c1_from_identity(g.at(i), 32).max() == 0);

  // single non-identity f0 at C1 distance ~0.5
  DerivProfile p({Real(0), Real("0.5"), Real(1)},
                 {Real("0.6"), Real("1.8"), Real("0.6")}, Real(0));
  Real tot = profile_integral(p.nodes(), p.dvals());
  std::vector<Real> d;
  for (const auto& v : p.dvals()) d.push_back(v / tot);
  UnitDiffeo f0 = unit_from_profile(DerivProfile(p.nodes(), d, Real(0)));
  UnitSeq seq;
  seq.lo = -2;
  seq.maps = {unit_identity(), unit_identity(), f0, unit_identity(),
              unit_identity()};
  FragmentReport rep2;
  UnitSeq g2 = fragment_sequence(seq, Real("0.1"), &rep2);
  CHECK(rep2.factor_count >= 5);
  CHECK(dbl(rep2.max_factor_dist) < 0.1 + 1e-12);
  CHECK(dbl(rep2.composition_residual) < 1e-9);
  for (long i = g2.lo; i <= g2.hi(); ++i)
    CHECK(dbl(unit_c1_from_identity(g2.at(i), 48).max()) < 0.1 + 1e-12);
  // tails untouched
  CHECK(g2.at(rep2.n0 + 1).eval(Real("0.3")) == Real("0.3"));

  // tail violation: a far entry too large for eps/2
  UnitSeq badseq;
  badseq.lo = -4;
  badseq.maps.assign(9, unit_identity());
  badseq.maps[0] = f0;  // index -4 in the tail
  badseq.maps[4] = f0;
  CHECK_THROWS_AS((void)fragment_sequence(badseq, Real("0.1"), nullptr), Error);
}

TEST_CASE("gap derivative profile") {
  // feasible: endpoints 1.2/0.8, one tracked plateau
  DerivProfile prof = gap_derivative_profile(
      Real(1), Real("1.2"), Real("0.8"), {{Real("0.3"), Real("0.6")}}, Real(1));
  CHECK(dbl(abs(prof.value_right() - 1)) < 1e-30);
  CHECK(prof.deriv(Real("0.45")) == prof.deriv(Real("0.35")));  // constant plateau

  // infeasible: endpoint ramps alone exceed the integral
  CHECK_THROWS_AS((void)gap_derivative_profile(Real(1), Real(2), Real(2),
                                               {{Real("0.1"), Real("0.9")}},
                                               Real("0.15")),
                  Error);
}

TEST_CASE("normalize wandering orbit on the fixture") {
  DenjoyBuild b = small_fixture();
  CircleArc A0;
  for (const auto& [n, arc] : b.intervals)
    if (n == 0) A0 = arc;
  WanderingOrbitConjugacy orb =
      normalize_wandering_orbit(b.map, A0, Real("0.3"), 10);
  CHECK(dbl(orb.worst_distortion) <= 0.3);
  CHECK(orb.locals.size() == 21);

  // distortion before vs after on the base interval
  Real before = distortion(b.map, A0, 48).value;
  CHECK(dbl(before) > 0.5);  // the fixture is strongly distorted on A_0

  // rotation arcs overlap immediately: not wandering
  CHECK_THROWS_AS((void)normalize_wandering_orbit(rotation_map(golden()),
                                                  CircleArc(Real(0), Real("0.3")),
                                                  Real("0.1"), 5),
                  Error);
}

TEST_CASE("extend conjugacy: trivial locals give the identity") {
  DenjoyBuild b = small_fixture();
  CircleDiffeo h = extend_conjugacy(b.map, {}, {});
  CHECK(h.eval(Real("0.123")) == Real("0.123"));
}

TEST_CASE("reduction certificates on the fixture") {
  DenjoyBuild b = small_fixture();
  Real eps("0.3");
  ReductionResult red = reduce_wandering_distortion(b.map, eps, Real("5e-3"));
  CHECK(red.pass);
  long tracked = 0;
  for (const auto& cert : red.certificates) {
    if (cert.tracked) {
      ++tracked;
      CHECK(dbl(cert.distortion_value) <= dbl(eps));
    }
  }
  CHECK(tracked >= 10);

  // the conjugated map still has rotation number near alpha
  RotationInterval iv = estimate_rotation_number(red.g, 500);
  CHECK(iv.contains(golden()));

  // h is a genuine C1 circle map: derivative positive on a grid
  for (int t = 0; t <= 256; ++t) {
    Real x = Real(t) / 256;
    CHECK(red.h.node().lift_deriv(x, Side::Right) > 0);
  }

  // minimal maps are rejected
  CHECK_THROWS_AS(
      (void)reduce_wandering_distortion(rotation_map(golden()), Real("0.1")),
      Error);
}
