#include "circdiff/adapted_segments.hpp"

#include <algorithm>
#include <numeric>

namespace circdiff {

const char* not_adapted_reason_name(NotAdaptedReason r) {
  switch (r) {
    case NotAdaptedReason::SegmentTooShort: return "segment_too_short";
    case NotAdaptedReason::IndexIZero: return "i=0";
    case NotAdaptedReason::IndexJZero: return "j=0";
    case NotAdaptedReason::Precursor: return "i+j=n-1";
  }
  return "?";
}

OrbitSegment orbit_segment(const CircleDiffeo& map, const Real& x, long n) {
  if (n < 2) throw Error(Errc::InvalidInput, "orbit segment needs n >= 2");
  OrbitSegment seg;
  seg.map = map;
  seg.base = mod1(x);
  seg.n = n;
  seg.points.resize(n + 1);
  seg.points[0] = seg.base;
  for (long j = 1; j <= n; ++j) seg.points[j] = map.eval(seg.points[j - 1]);
  seg.order.resize(n + 1);
  std::iota(seg.order.begin(), seg.order.end(), 0L);
  std::sort(seg.order.begin(), seg.order.end(), [&](long u, long v) {
    return seg.points[u] < seg.points[v];
  });
  const Real tol = collision_tolerance();
  for (long p = 0; p <= n; ++p) {
    Real gap = arc_length_ccw(seg.points[seg.order[p]],
                              seg.points[seg.order[(p + 1) % (n + 1)]]);
    if (gap < tol)
      throw Error(Errc::NearCollision,
                  "orbit points collide to working precision (near-periodic?)");
  }
  return seg;
}

namespace {

// position of index `idx` within seg.order
long sorted_position(const OrbitSegment& seg, long idx) {
  for (long p = 0; p < static_cast<long>(seg.order.size()); ++p)
    if (seg.order[p] == idx) return p;
  throw Error(Errc::InvalidInput, "index not in segment");
}

bool open_arc_hits_segment(const OrbitSegment& seg, const Real& u, const Real& v) {
  Real len = arc_length_ccw(u, v);
  for (const Real& p : seg.points) {
    Real off = arc_length_ccw(u, p);
    if (off > 0 && off < len) return true;
  }
  return false;
}

}  // namespace

AnalyzeResult analyze(const OrbitSegment& seg) {
  const long n = seg.n;
  const long m = n + 1;
  const long pos0 = sorted_position(seg, 0);
  const long posn = sorted_position(seg, n);
  const long ia = seg.order[(pos0 + m - 1) % m];  // index of a (left of x)
  const long ib = seg.order[(pos0 + 1) % m];      // index of b (right of x)
  const long i = seg.order[(posn + m - 1) % m];   // c = f^i(x)
  const long j = seg.order[(posn + 1) % m];       // d = f^j(x)
  const Real& x = seg.points[0];
  const Real& fx_n = seg.points[n];
  const Real a = seg.points[ia];
  const Real b = seg.points[ib];
  const Real c = seg.points[i];
  const Real d = seg.points[j];
  const Real R0 = arc_length_ccw(a, x) / arc_length_ccw(x, b);
  const Real Rn = arc_length_ccw(c, fx_n) / arc_length_ccw(fx_n, d);

  auto not_adapted = [&](NotAdaptedReason why) {
    NotAdapted na;
    na.reason = why;
    na.i = i;
    na.j = j;
    na.R0 = R0;
    na.Rn = Rn;
    return AnalyzeResult(na);
  };
  if (n < 2) return not_adapted(NotAdaptedReason::SegmentTooShort);
  if (i == 0) return not_adapted(NotAdaptedReason::IndexIZero);
  if (j == 0) return not_adapted(NotAdaptedReason::IndexJZero);
  if (i + j == n - 1) return not_adapted(NotAdaptedReason::Precursor);

  // index identities a = f^{n-j}(x), b = f^{n-i}(x)
  if (ia != n - j || ib != n - i)
    throw Error(Errc::PreconditionFailed,
                "neighbor indices violate a=f^{n-j}, b=f^{n-i} (corrupt segment)");
  // disjointness of (f(c), f(d)) and (f^-1(a), f^-1(b)) from the segment
  if (open_arc_hits_segment(seg, seg.points[i + 1], seg.points[j + 1]) ||
      open_arc_hits_segment(seg, seg.points[n - j - 1], seg.points[n - i - 1]))
    throw Error(Errc::PreconditionFailed,
                "basic-interval image meets the segment (corrupt segment)");

  AdaptedSegment out;
  out.segment = seg;
  out.i = i;
  out.j = j;
  out.a = a;
  out.b = b;
  out.c = c;
  out.d = d;
  out.R0 = R0;
  out.Rn = Rn;
  return AnalyzeResult(std::move(out));
}

AdaptedSegment require_adapted(AnalyzeResult res) {
  if (auto seg = std::get_if<AdaptedSegment>(&res)) return std::move(*seg);
  const auto& na = std::get<NotAdapted>(res);
  throw Error(Errc::NotAdapted,
              std::string("segment not adapted (") +
                  not_adapted_reason_name(na.reason) + ")");
}

bool is_adapted(const AnalyzeResult& res) {
  return std::holds_alternative<AdaptedSegment>(res);
}

long analysis_index_i(const AnalyzeResult& res) {
  return is_adapted(res) ? std::get<AdaptedSegment>(res).i : std::get<NotAdapted>(res).i;
}
long analysis_index_j(const AnalyzeResult& res) {
  return is_adapted(res) ? std::get<AdaptedSegment>(res).j : std::get<NotAdapted>(res).j;
}
Real analysis_R0(const AnalyzeResult& res) {
  return is_adapted(res) ? std::get<AdaptedSegment>(res).R0 : std::get<NotAdapted>(res).R0;
}
Real analysis_Rn(const AnalyzeResult& res) {
  return is_adapted(res) ? std::get<AdaptedSegment>(res).Rn : std::get<NotAdapted>(res).Rn;
}

bool similarly_ordered(const OrbitSegment& s1, const OrbitSegment& s2) {
  if (s1.n != s2.n)
    throw Error(Errc::LengthMismatch, "segments have different lengths");
  const long m = s1.n + 1;
  // rotate both sorted index sequences to start at index 0 and compare
  auto canonical = [m](const std::vector<long>& order) {
    long start = 0;
    while (order[start] != 0) ++start;
    std::vector<long> out(m);
    for (long p = 0; p < m; ++p) out[p] = order[(start + p) % m];
    return out;
  };
  return canonical(s1.order) == canonical(s2.order);
}

RatioInterval ratio_bound(const Real& lambda, long w) {
  if (!(lambda > 1) || w < 0)
    throw Error(Errc::InvalidInput, "need lambda > 1 and w >= 0");
  Real hi = pow(lambda, static_cast<int>(w));
  return {1 / hi, hi};
}

LyapunovBound lyapunov_bound(const CircleDiffeo& map,
                             const std::vector<long>& n_range, int x_samples) {
  if (n_range.empty() || x_samples < 1)
    throw Error(Errc::InvalidInput, "need nonempty n range and samples");
  Real worst(0);  // max |log df^n| / n
  long n_lo = n_range.front(), n_hi = n_range.front();
  for (long n : n_range) {
    n_lo = (std::min)(n_lo, n);
    n_hi = (std::max)(n_hi, n);
    for (int t = 0; t < x_samples; ++t) {
      Real x = Real(t) / x_samples;
      Real rate = abs(log(orbit_derivative(map, n, x))) / n;
      worst = (std::max)(worst, rate);
    }
  }
  return {exp(worst), n_lo, n_hi};
}

}  // namespace circdiff
