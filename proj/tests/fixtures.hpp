#pragma once

#include "circdiff/adapted_segments.hpp"
#include "circdiff/circle_map.hpp"
#include "circdiff/rotation_combinatorics.hpp"

#include <doctest.h>

namespace circdiff::testing {

inline Real golden() { return (sqrt(Real(5)) - 1) / 2; }

// Conjugated rotation h0 R_alpha h0^-1 with dh0 in [1 - a, 1 + a].
inline CircleDiffeo conjugated_rotation(const Real& alpha, const Real& a) {
  CircleDiffeo h0 = sine_map(Real(0), a);
  return conjugate(h0, rotation_map(alpha));
}

// Piecewise-affine map whose orbit segment of length k at base 0 is similarly
// ordered to the rotation's and carries prescribed initial/final ratios: the
// rotation's segment points are kept except that the two neighbor pairs of 0
// and of k*alpha are repositioned inside their combined gaps. Exercises the
// equal-ratio hypotheses of the affine-conjugacy lemma exactly (the map is
// affine between its own segment points, so its component distortion is 0).
struct MatchedSegmentTarget {
  CircleDiffeo map;
  Real base;  // = 0
};

inline MatchedSegmentTarget ratio_matched_pw_target(const Real& alpha, long k,
                                                    const Real& R0,
                                                    const Real& Rn) {
  std::vector<Real> pts(k + 1);
  for (long j = 0; j <= k; ++j) pts[j] = mod1(Real(j) * alpha);
  std::vector<long> order(k + 1);
  for (long j = 0; j <= k; ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](long u, long v) { return pts[u] < pts[v]; });
  auto pos_of = [&](long idx) {
    for (long p = 0; p <= k; ++p)
      if (order[p] == idx) return p;
    REQUIRE(false);
    return 0L;
  };
  const long m = k + 1;
  const long p0 = pos_of(0);
  const long r = order[(p0 + m - 1) % m];  // left neighbor of 0
  const long s = order[(p0 + 1) % m];      // right neighbor
  const long pk = pos_of(k);
  const long ci = order[(pk + m - 1) % m];  // left neighbor of k alpha
  const long di = order[(pk + 1) % m];      // right neighbor
  REQUIRE(r != s);
  REQUIRE(ci != di);
  REQUIRE(r != ci);  // would need k = r + s, excluded at characteristic times
  REQUIRE(s != di);
  if (di == r) {
    // one point is both the left neighbor of 0 and the right neighbor of
    // k alpha (k = 2r): its position couples a' and gamma'. Solve with the
    // shared gap G1 = gamma' + a' fixed and one free parameter.
    REQUIRE(ci != s);
    Real a = arc_length_ccw(pts[r], pts[0]);
    Real b = arc_length_ccw(pts[0], pts[s]);
    Real beta = arc_length_ccw(pts[ci], pts[k]);
    Real gamma = arc_length_ccw(pts[k], pts[r]);
    Real G1 = gamma + a;
    long p_s = pos_of(s);
    Real room_b = b + arc_length_ccw(pts[s], pts[order[(p_s + 1) % m]]);
    long p_c = pos_of(ci);
    Real room_beta = beta + arc_length_ccw(pts[order[(p_c + m - 1) % m]], pts[ci]);
    Real margin = G1 / 100;
    // constraints: a' = R0 b' with b' in (0, room_b);
    // beta' = Rn (G1 - a') in (0, room_beta)
    Real lo = (std::max)(margin, G1 - room_beta * (1 - Real("0.02")) / Rn);
    Real hi = (std::min)(G1 - margin, R0 * room_b * (1 - Real("0.02")));
    REQUIRE(lo < hi);
    Real a_new = (lo + hi) / 2;
    Real b_new = a_new / R0;
    Real beta_new = Rn * (G1 - a_new);
    pts[r] = mod1(pts[0] - a_new);
    pts[s] = mod1(pts[0] + b_new);
    pts[ci] = mod1(pts[k] - beta_new);
  } else if (ci == s) {
    // mirror case (k = 2s): the shared point is 0's right neighbor and the
    // left neighbor of k alpha
    Real a = arc_length_ccw(pts[r], pts[0]);
    Real b = arc_length_ccw(pts[0], pts[s]);
    Real beta = arc_length_ccw(pts[s], pts[k]);
    Real gamma = arc_length_ccw(pts[k], pts[di]);
    Real G2 = b + beta;
    long p_r = pos_of(r);
    Real room_a = a + arc_length_ccw(pts[order[(p_r + m - 1) % m]], pts[r]);
    long p_d = pos_of(di);
    Real room_gamma = gamma + arc_length_ccw(pts[di], pts[order[(p_d + 1) % m]]);
    Real margin = G2 / 100;
    // b' in (margin, G2 - margin); a' = R0 b' < room_a;
    // gamma' = (G2 - b')/Rn < room_gamma
    Real lo = (std::max)(margin, G2 - Rn * room_gamma * (1 - Real("0.02")));
    Real hi = (std::min)(G2 - margin, room_a * (1 - Real("0.02")) / R0);
    REQUIRE(lo < hi);
    Real b_new = (lo + hi) / 2;
    Real a_new = R0 * b_new;
    Real gamma_new = (G2 - b_new) / Rn;
    pts[r] = mod1(pts[0] - a_new);
    pts[s] = mod1(pts[0] + b_new);
    pts[di] = mod1(pts[k] + gamma_new);
  } else {
    // all four points distinct: move each pair inside its combined gap
    Real a = arc_length_ccw(pts[r], pts[0]);
    Real b = arc_length_ccw(pts[0], pts[s]);
    Real total = a + b;
    pts[r] = mod1(pts[0] - total * R0 / (1 + R0));
    pts[s] = mod1(pts[0] + total / (1 + R0));
    Real beta = arc_length_ccw(pts[ci], pts[k]);
    Real gamma = arc_length_ccw(pts[k], pts[di]);
    Real total2 = beta + gamma;
    pts[ci] = mod1(pts[k] - total2 * Rn / (1 + Rn));
    pts[di] = mod1(pts[k] + total2 / (1 + Rn));
  }
  // order must be unchanged
  std::vector<long> order2(k + 1);
  for (long j = 0; j <= k; ++j) order2[j] = j;
  std::sort(order2.begin(), order2.end(),
            [&](long u, long v) { return pts[u] < pts[v]; });
  REQUIRE(order == order2);
  // the map sends each segment point to the next; the final image continues
  // the rotation order inside the matching gap
  std::vector<Real> images(k + 1);
  for (long j = 0; j < k; ++j) images[j] = pts[j + 1];
  {
    Real next = mod1(Real(k + 1) * alpha);
    long left_idx = -1;
    Real best;
    for (long j = 0; j <= k; ++j) {
      Real off = arc_length_ccw(mod1(Real(j) * alpha), next);
      if (left_idx < 0 || off < best) { best = off; left_idx = j; }
    }
    long right_idx = order[(pos_of(left_idx) + 1) % m];
    Real lam = best / arc_length_ccw(mod1(Real(left_idx) * alpha),
                                     mod1(Real(right_idx) * alpha));
    images[k] =
        mod1(pts[left_idx] + lam * arc_length_ccw(pts[left_idx], pts[right_idx]));
  }
  return {pw_affine_map(pts, images), Real(0)};
}

}  // namespace circdiff::testing
