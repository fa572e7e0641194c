#pragma once

#include "circdiff/arc.hpp"
#include "circdiff/circle_map.hpp"

#include <functional>

namespace circdiff {

struct DistortionReport {
  CircleArc arc;
  Real value;      // max over sampled pairs of log(df(x)/df(y)), >= 0
  Real x_max;      // sample realizing the largest derivative
  Real x_min;      // sample realizing the smallest derivative
};

// Distortion of `map` on `arc`, sampled on a dyadic grid of `samples` interior
// points plus the endpoints and one-sided values at interior breakpoints.
// Doubling `samples` refines the same grid, so the result is nondecreasing in
// the sample count.
DistortionReport distortion(const CircleDiffeo& map, const CircleArc& arc,
                            int samples = 64);

struct C1Distance {
  Real sup;    // max circle distance |f(x) - g(x)| over the grid
  Real deriv;  // max |df - dg| over the grid, matching one-sided values
};

C1Distance c1_distance(const CircleDiffeo& f, const CircleDiffeo& g, int grid = 1024);

struct RotationInterval {
  Real lo, hi;  // contains the rotation number; width 2/n
  bool contains(const Real& v) const { return lo <= v && v <= hi; }
  bool overlaps(const RotationInterval& o) const { return lo <= o.hi && o.lo <= hi; }
};

RotationInterval estimate_rotation_number(const CircleDiffeo& map, long n);

// Bisection on a one-parameter family, monotone in rotation number (caller
// asserts), until the rotation interval at n = ceil(2/tol) straddles the
// irrational target. Throws NotBracketed when [lo, hi] does not bracket it,
// InvalidInput when the target is numerically rational.
Real tune_parameter_to_rotation(
    const std::function<CircleDiffeo(const Real&)>& family, const Real& lo,
    const Real& hi, const Real& target, const Real& tol);

}  // namespace circdiff
