#include "circdiff/profile.hpp"
#include "circdiff/rng.hpp"
#include "circdiff/unit_diffeo.hpp"

#include <doctest.h>

using namespace circdiff;

namespace {
double dbl(const Real& v) { return static_cast<double>(v); }
}  // namespace

TEST_CASE("profile eval, derivative and inversion") {
  // derivative ramps 1 -> 3 on [0, 2]: F(x) = x + x^2/2
  DerivProfile p({Real(0), Real(2)}, {Real(1), Real(3)}, Real(0));
  CHECK(dbl(abs(p.eval(Real(1)) - Real("1.5"))) < 1e-30);
  CHECK(dbl(abs(p.deriv(Real(1)) - Real(2))) < 1e-30);
  CHECK(dbl(abs(p.invert(Real("1.5")) - Real(1))) < 1e-25);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    Real x = rng.uniform(Real(0), Real(2));
    CHECK(dbl(abs(p.invert(p.eval(x)) - x)) < 1e-25);
  }
}

TEST_CASE("bridges meet their endpoint data") {
  DerivProfile b = monotone_c1_bridge(Real(0), Real(1), Real(0), Real("1.1"),
                                      Real(1), Real("1.2"));
  CHECK(dbl(abs(b.eval(Real(1)) - Real("1.1"))) < 1e-30);
  CHECK(dbl(abs(b.deriv(Real(0)) - 1)) < 1e-30);
  CHECK(dbl(abs(b.deriv(Real(1)) - Real("1.2"))) < 1e-30);
  // infeasible: value gap too small for the endpoint derivatives
  CHECK_THROWS_AS((void)monotone_c1_bridge(Real(0), Real(1), Real(0),
                                           Real("0.2"), Real(1), Real(1)),
                  Error);

  DerivProfile pl = plateau_bridge(Real(0), Real(4), Real(0), Real(3), Real(1),
                                   Real(1), Real("0.25"));
  CHECK(dbl(abs(pl.eval(Real(4)) - 3)) < 1e-28);
}

TEST_CASE("unit piecewise and restriction") {
  // two affine pieces through (1/2 -> 1/3)
  DerivProfile prof({Real(0), Real("0.5"), Real(1)},
                    {Real("0.75"), Real("0.58"), Real("1.76")}, Real(0));
  Real total = prof.value_right();
  // normalize to a unit profile
  std::vector<Real> d{Real("0.75") / total, Real("0.58") / total,
                      Real("1.76") / total};
  UnitDiffeo u = unit_from_profile(
      DerivProfile({Real(0), Real("0.5"), Real(1)}, d, Real(0)));
  CHECK(dbl(abs(u.eval(Real(0)))) == 0);
  CHECK(dbl(abs(u.eval(Real(1)) - 1)) < 1e-28);
  Real mid = u.eval(Real("0.5"));
  UnitDiffeo r = unit_restrict(u, Real(0), Real("0.5"));
  CHECK(dbl(abs(r.eval(Real(1)) - 1)) < 1e-28);
  CHECK(dbl(abs(r.eval(Real("0.4")) - u.eval(Real("0.2")) / mid)) < 1e-25);

  UnitDiffeo inv = unit_inverse(u);
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    Real x = rng.uniform(Real(0), Real(1));
    CHECK(dbl(abs(inv.eval(u.eval(x)) - x)) < 1e-25);
  }
}

TEST_CASE("convex path factors") {
  DerivProfile prof({Real(0), Real(1)}, {Real("0.5"), Real("1.5")}, Real(0));
  UnitDiffeo F = unit_from_profile(prof);
  UnitDiffeo half = unit_convex_with(F, Real("0.5"));
  Real x("0.3");
  CHECK(dbl(abs(half.eval(x) - (x / 2 + F.eval(x) / 2))) < 1e-30);
  CHECK(dbl(abs(half.invert(half.eval(x)) - x)) < 1e-20);
}

TEST_CASE("unit c1 distance and distortion") {
  UnitDiffeo id = unit_identity();
  CHECK(unit_c1_distance(id, id).max() == 0);
  DerivProfile prof({Real(0), Real(1)}, {Real("0.9"), Real("1.1")}, Real(0));
  UnitDiffeo u = unit_from_profile(prof);
  UnitC1Distance d = unit_c1_from_identity(u);
  CHECK(dbl(abs(d.deriv - Real("0.1"))) < 1e-12);
  CHECK(dbl(abs(unit_distortion(u, Real(0), Real(1)) - log(Real("1.1") / Real("0.9")))) < 1e-12);
}
