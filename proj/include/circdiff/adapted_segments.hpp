#pragma once

#include "circdiff/circle_map.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace circdiff {

struct OrbitSegment {
  CircleDiffeo map;
  Real base;                 // x
  long n = 0;                // segment length (n+1 points)
  std::vector<Real> points;  // points[j] = f^j(x), circle coordinates
  std::vector<long> order;   // indices sorted by circular position
};

// Iterates the map and sorts the points. Throws NearCollision when two points
// come closer than the collision tolerance.
OrbitSegment orbit_segment(const CircleDiffeo& map, const Real& x, long n);

// Basic-interval data of an orbit segment: [a,b] is the gap around x, [c,d]
// the gap around f^n(x), with c = f^i(x) and d = f^j(x).
struct AdaptedSegment {
  OrbitSegment segment;
  long i = 0, j = 0;
  Real a, b, c, d;
  Real R0, Rn;  // initial and final ratio
};

enum class NotAdaptedReason {
  SegmentTooShort,  // n < 2
  IndexIZero,       // c = x
  IndexJZero,       // d = x
  Precursor,        // i + j = n - 1
};

const char* not_adapted_reason_name(NotAdaptedReason r);

struct NotAdapted {
  NotAdaptedReason reason;
  long i = -1, j = -1;  // literal indices when computable
  Real R0, Rn;
};

using AnalyzeResult = std::variant<AdaptedSegment, NotAdapted>;

// Finds the neighbors of x and f^n(x), the indices i, j and the ratios.
// For adapted segments the disjointness of (f(c), f(d)) and
// (f^-1(a), f^-1(b)) from the segment is verified; a violation means the
// segment is numerically corrupt and throws.
AnalyzeResult analyze(const OrbitSegment& seg);

AdaptedSegment require_adapted(AnalyzeResult res);
bool is_adapted(const AnalyzeResult& res);
long analysis_index_i(const AnalyzeResult& res);
long analysis_index_j(const AnalyzeResult& res);
Real analysis_R0(const AnalyzeResult& res);
Real analysis_Rn(const AnalyzeResult& res);

// True iff the circular orders agree (up to the common rotation of labels).
// Throws LengthMismatch for segments of different lengths.
bool similarly_ordered(const OrbitSegment& s1, const OrbitSegment& s2);

struct RatioInterval {
  Real lo, hi;
  bool contains(const Real& v) const { return lo <= v && v <= hi; }
};

// [lambda^-w, lambda^w]
RatioInterval ratio_bound(const Real& lambda, long w);

struct LyapunovBound {
  Real lambda;  // smallest empirical lambda with |log df^n| <= n log lambda
  long n_lo = 0, n_hi = 0;
};

LyapunovBound lyapunov_bound(const CircleDiffeo& map,
                             const std::vector<long>& n_range, int x_samples);

}  // namespace circdiff
