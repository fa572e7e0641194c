#include "circdiff/conjugacy_builder.hpp"
#include "circdiff/rng.hpp"
#include "circdiff/rotation_combinatorics.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace circdiff;
using circdiff::testing::golden;
using circdiff::testing::ratio_matched_pw_target;

namespace {
double dbl(const Real& v) { return static_cast<double>(v); }
}  // namespace

TEST_CASE("blend formula values") {
  RealBlend h = blend(Real(1), Real(2));
  CHECK(dbl(abs(h.eval(Real(0)) - Real("0.25"))) == 0);
  CHECK(dbl(abs(h.deriv(Real(0)) - Real("1.5"))) == 0);
  CHECK(dbl(abs(h.eval(Real(-1)) + 1)) == 0);
  CHECK(dbl(abs(h.deriv(Real(-1)) - 1)) == 0);
  CHECK(dbl(abs(h.eval(Real(1)) - 2)) == 0);
  CHECK(dbl(abs(h.deriv(Real(1)) - 2)) == 0);

  // degenerate blend is the linear map
  RealBlend flat = blend(Real("0.7"), Real("0.7"));
  CHECK(dbl(abs(flat.eval(Real("0.3")) - Real("0.21"))) < 1e-30);
}

TEST_CASE("blend C1 gluing and derivative band on random slopes") {
  Rng rng(41);
  for (int t = 0; t < 1000; ++t) {
    Real a = rng.uniform(Real("0.1"), Real(10));
    Real b = rng.uniform(Real("0.1"), Real(10));
    RealBlend h = blend(a, b);
    const Real step("1e-20");
    // value and derivative continuity at the seams
    CHECK(dbl(abs(h.eval(Real(-1) - step) - h.eval(Real(-1) + step))) < 1e-12);
    CHECK(dbl(abs(h.eval(Real(1) - step) - h.eval(Real(1) + step))) < 1e-12);
    CHECK(dbl(abs(h.deriv(Real(-1) - step) - h.deriv(Real(-1) + step))) < 1e-12);
    CHECK(dbl(abs(h.deriv(Real(1) - step) - h.deriv(Real(1) + step))) < 1e-12);
    Real lo = (std::min)(a, b), hi = (std::max)(a, b);
    for (int q = 0; q <= 64; ++q) {
      Real x = -2 + Real(4 * q) / 64;
      Real d = h.deriv(x);
      CHECK(d >= lo - Real("1e-30"));
      CHECK(d <= hi + Real("1e-30"));
    }
  }
}

TEST_CASE("smoothing lemma bound and mediant on random quadruples") {
  Rng rng(43);
  for (int t = 0; t < 1000; ++t) {
    Real a = rng.uniform(Real("0.1"), Real(10));
    Real b = rng.uniform(Real("0.1"), Real(10));
    Real c = rng.uniform(Real("0.1"), Real(10));
    Real d = rng.uniform(Real("0.1"), Real(10));
    REQUIRE(blend_ratio_bound_check(a, b, c, d, 64));
  }
  // documented quadruples
  CHECK(blend_ratio_bound_check(Real(1), Real(2), Real(2), Real(1), 128));
  CHECK(blend_ratio_bound_check(Real(1), Real(3), Real(2), Real(2), 128));
}

TEST_CASE("mediant inequality on random quadruples") {
  Rng rng(47);
  for (int t = 0; t < 10000; ++t) {
    Real a = rng.uniform(Real("1e-3"), Real(50));
    Real b = rng.uniform(Real("1e-3"), Real(50));
    Real c = rng.uniform(Real("1e-3"), Real(50));
    Real d = rng.uniform(Real("1e-3"), Real(50));
    Real med = (a + b) / (c + d);
    Real lo = (std::min)(a / c, b / d);
    Real hi = (std::max)(a / c, b / d);
    REQUIRE(med >= lo);
    REQUIRE(med <= hi);
  }
}

TEST_CASE("localized blend agrees with its host at the window edges") {
  PwAffineHomeo host({Real(0), Real("0.5")}, {Real("0.1"), Real("0.7")});
  BlendSpec spec{Real("1.2"), Real("0.8"), Real("0.5"), Real("0.01"), host};
  LocalBlend lb = localized_blend(spec);
  Real l = Real("0.5") - Real("0.01");
  Real r = Real("0.5") + Real("0.01");
  CHECK(dbl(abs(lb.eval(l) - host.eval(l))) < 1e-12);
  CHECK(dbl(abs(lb.eval(r) - host.eval(r))) < 1e-12);
  CHECK(dbl(abs(lb.deriv(l) - Real("1.2"))) < 1e-25);
  CHECK(dbl(abs(lb.deriv(r) - Real("0.8"))) < 1e-25);
  // derivative at the center is the midpoint slope
  CHECK(dbl(abs(lb.deriv(Real("0.5")) - 1)) < 1e-25);
  // degenerate spec coincides with the host inside the window
  PwAffineHomeo rot_host({Real(0), Real("0.5")}, {Real("0.25"), Real("0.75")});
  BlendSpec flat{Real(1), Real(1), Real("0.25"), Real("0.01"), rot_host};
  LocalBlend fl = localized_blend(flat);
  CHECK(dbl(abs(fl.eval(Real("0.248")) - rot_host.eval(Real("0.248")))) < 1e-30);
}

TEST_CASE("build_conjugacy: identity and guards") {
  Real a = golden();
  CircleDiffeo rot = rotation_map(a);
  AdaptedSegment sf = require_adapted(analyze(orbit_segment(rot, Real(0), 6)));
  AdaptedSegment sg = require_adapted(analyze(orbit_segment(rot, Real(0), 6)));
  PwAffineHomeo H = build_conjugacy(sf, sg);
  for (int t = 0; t <= 32; ++t) {
    Real x = Real(t) / 32;
    CHECK(dbl(circle_dist(H.eval(x), x)) < 1e-30);
  }

  // mismatched ratios are rejected
  auto bad = ratio_matched_pw_target(a, 6, sf.R0 * Real("1.1"), sf.Rn);
  AdaptedSegment sb = require_adapted(analyze(orbit_segment(bad.map, bad.base, 6)));
  CHECK_THROWS_AS((void)build_conjugacy(sf, sb), Error);
}

TEST_CASE("lemma l.affine certificate on matched segments") {
  Real a = golden();
  CircleDiffeo f = testing::conjugated_rotation(a, Real("0.4"));
  for (long k : {6L, 11L, 19L, 32L}) {
    CAPTURE(k);
    Real x0 = sine_map(Real(0), Real("0.4")).eval(Real(0));
    OrbitSegment seg_f = orbit_segment(f, x0, k);
    AdaptedSegment af = require_adapted(analyze(seg_f));
    auto target = ratio_matched_pw_target(a, k, af.R0, af.Rn);
    OrbitSegment seg_g = orbit_segment(target.map, target.base, k);
    AdaptedSegment ag = require_adapted(analyze(seg_g));
    PwAffineHomeo H = build_conjugacy(af, ag);
    CertReport rep = conjugacy_derivative_certificate(H, f, target.map, seg_f,
                                                      seg_g, Real(0), 48);
    CHECK(rep.pass);
    CHECK(rep.epsilon > 0);
    if (rep.epsilon < Real("0.4"))
      CHECK(rep.additive_bound < 3 * rep.epsilon * rep.max_dg);
    require_cert(rep);
  }
}

TEST_CASE("certificate negative control: corrupted H") {
  Real a = golden();
  CircleDiffeo f = testing::conjugated_rotation(a, Real("0.4"));
  Real x0 = sine_map(Real(0), Real("0.4")).eval(Real(0));
  OrbitSegment seg_f = orbit_segment(f, x0, 11);
  AdaptedSegment af = require_adapted(analyze(seg_f));
  auto target = ratio_matched_pw_target(a, 11, af.R0, af.Rn);
  OrbitSegment seg_g = orbit_segment(target.map, target.base, 11);
  AdaptedSegment ag = require_adapted(analyze(seg_g));
  PwAffineHomeo H = build_conjugacy(af, ag);
  // shift one interior image point across most of its gap
  std::vector<Real> bps = H.breakpoints();
  std::vector<Real> ims = H.images();
  Real gap = arc_length_ccw(ims[4], ims[5]);
  ims[4] = mod1(ims[4] + gap * Real("0.8"));
  PwAffineHomeo H_bad(bps, ims);
  CertReport rep = conjugacy_derivative_certificate(H_bad, f, target.map, seg_f,
                                                    seg_g, Real(0), 48);
  CHECK_FALSE(rep.pass);
  CHECK_THROWS_AS(require_cert(rep), Error);
}

TEST_CASE("linearization of a rotation is the identity") {
  Real a = golden();
  CircleDiffeo rot = rotation_map(a);
  OrbitSegment seg = orbit_segment(rot, Real(0), 6);
  Linearization lin = linearize_near_segment(rot, seg, Real("0.001"));
  for (int t = 0; t <= 64; ++t) {
    Real x = Real(t) / 64;
    CHECK(dbl(circle_dist(lin.phi.eval(x), x)) < 1e-25);
    CHECK(dbl(abs(lin.phi.deriv(x) - 1)) < 1e-25);
  }
}

TEST_CASE("linearization straightens a conjugated rotation") {
  Real a = golden();
  CircleDiffeo f = testing::conjugated_rotation(a, Real("0.4"));
  OrbitSegment seg = orbit_segment(f, Real("0.2"), 6);
  Real t = default_linearization_radius(seg);
  Linearization lin = linearize_near_segment(f, seg, t);

  // phi fixes the orbit points with derivative one
  for (long i = 0; i <= seg.n; ++i) {
    CHECK(dbl(circle_dist(lin.phi.eval(seg.points[i]), seg.points[i])) < 1e-25);
    CHECK(dbl(abs(lin.phi.deriv(seg.points[i]) - 1)) < 1e-25);
  }

  // f_lin is affine on each inner window: slope constant to high accuracy
  for (long i = 0; i <= seg.n; ++i) {
    Real m = f.deriv(seg.points[i]);
    for (int q = -4; q <= 4; ++q) {
      Real z = mod1(seg.points[i] + Real(q) * t / 5);
      CHECK(dbl(abs(lin.f_lin.deriv(z) - m)) < 1e-9);
      // affine onto the image window
      Real img = lin.f_lin.eval(z);
      Real expect = mod1(seg.points[(i + 1) % (seg.n + 1)] +
                         m * Real(q) * t / 5);
      if (i < seg.n) CHECK(dbl(circle_dist(img, expect)) < 1e-9);
    }
  }

  // phi -> id in C1 as t -> 0
  Linearization lin2 = linearize_near_segment(f, seg, t / 8);
  C1Distance d1 = c1_distance(lin.phi, identity_map(), 512);
  C1Distance d2 = c1_distance(lin2.phi, identity_map(), 512);
  CHECK(d2.sup <= d1.sup);
  CHECK(d2.deriv <= d1.deriv * Real("1.01"));

  // overlapping windows are rejected
  CHECK_THROWS_AS((void)linearize_near_segment(f, seg, Real("0.2")), Error);
}

TEST_CASE("smooth_conjugacy produces a C1 map within the 2-eps band") {
  Real a = golden();
  CircleDiffeo f = testing::conjugated_rotation(a, Real("0.35"));
  for (long k : {6L, 11L, 19L}) {
    CAPTURE(k);
    Real x0 = sine_map(Real(0), Real("0.35")).eval(Real("0.4"));
    OrbitSegment seg_f = orbit_segment(f, x0, k);
    AdaptedSegment af = require_adapted(analyze(seg_f));
    auto target = ratio_matched_pw_target(a, k, af.R0, af.Rn);
    AdaptedSegment ag =
        require_adapted(analyze(orbit_segment(target.map, target.base, k)));
    PwAffineHomeo H = build_conjugacy(af, ag);
    Real t = default_linearization_radius(seg_f);
    Linearization lin = linearize_near_segment(f, seg_f, t);
    Real eta = default_smoothing_radius(seg_f, lin.seed_radius);
    SmoothingReport rep;
    CircleDiffeo h = smooth_conjugacy(H, lin.f_lin, seg_f, eta, &rep);
    CHECK(rep.pass);
    CHECK(rep.worst_gap < 2 * rep.epsilon);

    // h is C1: one-sided derivatives agree everywhere sampled
    for (const Real& b : h.breakpoints()) {
      Real dl = h.node().lift_deriv(b, Side::Left);
      Real dr = h.node().lift_deriv(b, Side::Right);
      CHECK(dbl(abs(dl - dr)) < 1e-9);
    }
    // h equals H outside the windows: probe component midpoints
    std::vector<Real> sorted_pts = seg_f.points;
    std::sort(sorted_pts.begin(), sorted_pts.end());
    for (size_t q = 0; q < sorted_pts.size(); ++q) {
      Real mid = mod1(sorted_pts[q] +
                      arc_length_ccw(sorted_pts[q],
                                     sorted_pts[(q + 1) % sorted_pts.size()]) /
                          2);
      CHECK(dbl(circle_dist(h.eval(mid), H.eval(mid))) < 1e-30);
    }
  }
}

TEST_CASE("smooth_conjugacy degenerate case: H already smooth") {
  Real a = golden();
  CircleDiffeo rot = rotation_map(a);
  OrbitSegment seg = orbit_segment(rot, Real(0), 6);
  AdaptedSegment s1 = require_adapted(analyze(seg));
  PwAffineHomeo H = build_conjugacy(s1, s1);  // identity
  Linearization lin = linearize_near_segment(rot, seg, Real("0.001"));
  SmoothingReport rep;
  CircleDiffeo h = smooth_conjugacy(H, lin.f_lin, seg, Real("0.0005"), &rep);
  CHECK(rep.pass);
  for (int t = 0; t <= 64; ++t)
    CHECK(dbl(circle_dist(h.eval(Real(t) / 64), H.eval(Real(t) / 64))) < 1e-30);
}

TEST_CASE("smoothing window identity A_{i+1} f_lin = A_i") {
  Real a = golden();
  CircleDiffeo f = testing::conjugated_rotation(a, Real("0.35"));
  OrbitSegment seg = orbit_segment(f, Real("0.15"), 11);
  Real t = default_linearization_radius(seg);
  Linearization lin = linearize_near_segment(f, seg, t);
  Real eta = default_smoothing_radius(seg, lin.seed_radius);
  // A_i(z) = (z - p_i)/eta_i with eta_i = df^i(x) eta
  Real Mi(1);
  for (long i = 0; i < seg.n; ++i) {
    Real eta_i = Mi * eta;
    Real m = lin.f_lin.deriv(seg.points[i]);
    Real Mi1 = Mi * m;
    Real eta_i1 = Mi1 * eta;
    for (int q = -2; q <= 2; ++q) {
      Real z = mod1(seg.points[i] + Real(q) * eta_i / 3);
      Real Ai = Real(q) / 3;  // (z - p_i)/eta_i
      Real fz = lin.f_lin.eval(z);
      Real off = mod1(fz - seg.points[i + 1]);
      if (off > Real(1) / 2) off -= 1;  // signed offset from p_{i+1}
      CHECK(dbl(abs(off / eta_i1 - Ai)) < 1e-20);
    }
    Mi = Mi1;
  }
}
