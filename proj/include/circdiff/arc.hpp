#pragma once

#include "circdiff/real.hpp"

#include <vector>

namespace circdiff {

// Counterclockwise arc from `left` to `right` on R/Z. Endpoints are circle
// points in [0, 1); the arc may straddle 0.
struct CircleArc {
  Real left;
  Real right;

  CircleArc() = default;
  CircleArc(Real l, Real r) : left(mod1(l)), right(mod1(r)) {}

  Real length() const { return arc_length_ccw(left, right); }
  bool contains(const Real& x) const {
    return arc_length_ccw(left, x) < length();
  }
  // Point at parameter t in [0,1] along the arc.
  Real at(const Real& t) const { return mod1(left + t * length()); }
};

bool arcs_overlap(const CircleArc& a, const CircleArc& b);

// True when all arcs are pairwise disjoint (open arcs).
bool pairwise_disjoint(const std::vector<CircleArc>& arcs);

}  // namespace circdiff
