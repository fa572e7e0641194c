#include "circdiff/arc.hpp"

#include <algorithm>

namespace circdiff {

bool arcs_overlap(const CircleArc& a, const CircleArc& b) {
  // Open-arc overlap: either contains an endpoint of the other, or equal span.
  if (a.contains(b.left) && arc_length_ccw(a.left, b.left) > 0) return true;
  if (b.contains(a.left) && arc_length_ccw(b.left, a.left) > 0) return true;
  if (a.left == b.left) return true;
  return false;
}

bool pairwise_disjoint(const std::vector<CircleArc>& arcs) {
  if (arcs.size() < 2) return true;
  std::vector<std::pair<Real, Real>> spans;  // (left, length)
  spans.reserve(arcs.size());
  for (const auto& a : arcs) spans.emplace_back(a.left, a.length());
  std::sort(spans.begin(), spans.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  // arcs that share an endpoint in exact arithmetic may acquire a
  // sub-precision overlap from rounding; treat those as touching
  const Real slack = pow(Real(2), -static_cast<int>(precision_bits() * 3 / 5));
  for (size_t i = 0; i < spans.size(); ++i) {
    const auto& cur = spans[i];
    const auto& nxt = spans[(i + 1) % spans.size()];
    Real gap = i + 1 < spans.size() ? nxt.first - cur.first
                                    : nxt.first + 1 - cur.first;
    if (cur.second > gap + slack) return false;
  }
  return true;
}

}  // namespace circdiff
