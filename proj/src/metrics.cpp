#include "circdiff/metrics.hpp"

#include <algorithm>

namespace circdiff {

DistortionReport distortion(const CircleDiffeo& map, const CircleArc& arc,
                            int samples) {
  const Real len = arc.length();
  struct Probe { Real x; Side side; };
  std::vector<Probe> probes;
  probes.push_back({arc.left, Side::Right});
  probes.push_back({arc.right, Side::Left});
  for (int i = 1; i < samples; ++i)
    probes.push_back({arc.at(Real(i) / samples), Side::Right});
  for (const Real& b : map.breakpoints()) {
    if (!arc.contains(b)) continue;
    probes.push_back({b, Side::Left});
    probes.push_back({b, Side::Right});
  }
  Real best_hi, best_lo, x_hi, x_lo;
  bool first = true;
  for (const auto& p : probes) {
    Real d = log(map.node().lift_deriv(p.x, p.side));
    if (first || d > best_hi) { best_hi = d; x_hi = p.x; }
    if (first || d < best_lo) { best_lo = d; x_lo = p.x; }
    first = false;
  }
  return {arc, best_hi - best_lo, x_hi, x_lo};
}

C1Distance c1_distance(const CircleDiffeo& f, const CircleDiffeo& g, int grid) {
  Real sup(0), dd(0);
  for (int i = 0; i < grid; ++i) {
    Real x = Real(i) / grid;
    sup = (std::max)(sup, circle_dist(f.eval(x), g.eval(x)));
    // compare matching one-sided values; smooth points give equal sides
    for (Side s : {Side::Left, Side::Right}) {
      Real df = f.node().lift_deriv(x, s);
      Real dg = g.node().lift_deriv(x, s);
      dd = (std::max)(dd, abs(df - dg));
    }
  }
  return {sup, dd};
}

RotationInterval estimate_rotation_number(const CircleDiffeo& map, long n) {
  if (n < 1) throw Error(Errc::InvalidInput, "need n >= 1");
  Real Fn = orbit_point(map, n, Real(0));
  return {(Fn - 1) / n, (Fn + 1) / n};
}

Real tune_parameter_to_rotation(
    const std::function<CircleDiffeo(const Real&)>& family, const Real& lo_in,
    const Real& hi_in, const Real& target, const Real& tol) {
  if (is_numerically_rational(target))
    throw Error(Errc::InvalidInput, "rotation-number target is rational");
  long n = static_cast<long>(ceil(2 / tol));
  auto classify = [&](const Real& t) {
    RotationInterval iv = estimate_rotation_number(family(t), n);
    if (iv.hi < target) return -1;
    if (iv.lo > target) return +1;
    return 0;
  };
  Real lo = lo_in, hi = hi_in;
  int clo = classify(lo);
  if (clo == 0) return lo;
  int chi = classify(hi);
  if (chi == 0) return hi;
  if (clo == chi)
    throw Error(Errc::NotBracketed, "parameter interval does not bracket target");
  for (int iter = 0; iter < 256; ++iter) {
    Real mid = (lo + hi) / 2;
    int c = classify(mid);
    if (c == 0) return mid;
    if (c == clo) lo = mid; else hi = mid;
    if (hi - lo < tol * tol) break;
  }
  throw Error(Errc::NoConvergence, "parameter bisection failed to straddle target");
}

}  // namespace circdiff
