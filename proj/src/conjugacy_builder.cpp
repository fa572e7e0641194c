#include "circdiff/conjugacy_builder.hpp"

#include <algorithm>

namespace circdiff {

PwAffineHomeo::PwAffineHomeo(std::vector<Real> breakpoints, std::vector<Real> images)
    : diffeo_(CircleDiffeo(PwQuadNode::affine(breakpoints, images))) {
  const size_t m = breakpoints.size();
  std::vector<size_t> idx(m);
  for (size_t i = 0; i < m; ++i) idx[i] = i;
  for (auto& b : breakpoints) b = mod1(b);
  for (auto& v : images) v = mod1(v);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return breakpoints[a] < breakpoints[b]; });
  breakpoints_.reserve(m);
  images_.reserve(m);
  for (size_t i : idx) {
    breakpoints_.push_back(breakpoints[i]);
    images_.push_back(images[i]);
  }
}

std::vector<Real> PwAffineHomeo::slopes() const {
  const size_t m = breakpoints_.size();
  std::vector<Real> out(m);
  for (size_t i = 0; i < m; ++i) {
    const size_t j = (i + 1) % m;
    out[i] = arc_length_ccw(images_[i], images_[j]) /
             arc_length_ccw(breakpoints_[i], breakpoints_[j]);
  }
  return out;
}

PwAffineHomeo build_conjugacy(const AdaptedSegment& seg_f,
                              const AdaptedSegment& seg_g,
                              const Real& tol_ratio) {
  const OrbitSegment& sf = seg_f.segment;
  const OrbitSegment& sg = seg_g.segment;
  if (sf.n != sg.n)
    throw Error(Errc::LengthMismatch, "segments have different lengths");
  if (!similarly_ordered(sf, sg))
    throw Error(Errc::OrderMismatch, "segments are not similarly ordered");
  auto rel = [](const Real& u, const Real& v) { return abs(u - v) / abs(v); };
  if (rel(seg_f.R0, seg_g.R0) > tol_ratio || rel(seg_f.Rn, seg_g.Rn) > tol_ratio)
    throw Error(Errc::RatioMismatch,
                "initial/final ratios differ beyond tolerance: R0 " +
                    to_decimal_string(seg_f.R0) + " vs " + to_decimal_string(seg_g.R0) +
                    ", Rn " + to_decimal_string(seg_f.Rn) + " vs " +
                    to_decimal_string(seg_g.Rn));
  PwAffineHomeo H(sf.points, sg.points);
  // equal ratios make H affine across x and f^n(x); verify both slopes agree
  auto check_diff_at = [&](const Real& x) {
    Real dl = H.deriv(x, Side::Left);
    Real dr = H.deriv(x, Side::Right);
    if (abs(dl - dr) / dr > 8 * tol_ratio)
      throw Error(Errc::RatioMismatch,
                  "H fails differentiability at a segment endpoint");
  };
  check_diff_at(sf.points[0]);
  check_diff_at(sf.points[sf.n]);
  return H;
}

namespace {

// consecutive circular components of the complement of the segment points,
// as (left endpoint, right endpoint) pairs
std::vector<CircleArc> complement_components(const OrbitSegment& seg) {
  std::vector<Real> sorted;
  sorted.reserve(seg.points.size());
  for (long idx : seg.order) sorted.push_back(seg.points[idx]);
  std::vector<CircleArc> comps;
  comps.reserve(sorted.size());
  for (size_t t = 0; t < sorted.size(); ++t)
    comps.emplace_back(sorted[t], sorted[(t + 1) % sorted.size()]);
  return comps;
}

Real max_component_distortion(const CircleDiffeo& f, const OrbitSegment& seg,
                              int samples) {
  Real worst(0);
  for (const auto& comp : complement_components(seg))
    worst = (std::max)(worst, distortion(f, comp, samples).value);
  return worst;
}

}  // namespace

CertReport conjugacy_derivative_certificate(const PwAffineHomeo& H,
                                            const CircleDiffeo& f,
                                            const CircleDiffeo& g,
                                            const OrbitSegment& seg_f,
                                            const OrbitSegment& seg_g,
                                            const Real& eps_in,
                                            int samples_per_component) {
  Real measured = (std::max)(max_component_distortion(f, seg_f, samples_per_component),
                             max_component_distortion(g, seg_g, samples_per_component));
  Real eps = eps_in;
  if (eps_in > 0) {
    if (measured > eps_in)
      throw Error(Errc::PreconditionFailed,
                  "component distortion " + to_decimal_string(measured) +
                      " exceeds the supplied bound " + to_decimal_string(eps_in));
  } else {
    eps = measured;
  }

  CircleDiffeo conj = conjugate(H.as_diffeo(), f);
  const Real lo = exp(-2 * eps), hi = exp(2 * eps);
  CertReport rep;
  rep.bound_type = "l_affine";
  rep.epsilon = eps;
  rep.worst_ratio = Real(1);
  rep.worst_point = Real(0);
  rep.pass = true;

  Real max_dg(0);
  auto probe = [&](const Real& z, Side side) {
    Real dg = g.node().lift_deriv(z, side);
    Real dc = conj.node().lift_deriv(z, side);
    Real ratio = dc / dg;
    max_dg = (std::max)(max_dg, dg);
    ++rep.samples;
    if (abs(log(ratio)) > abs(log(rep.worst_ratio))) {
      rep.worst_ratio = ratio;
      rep.worst_point = mod1(z);
    }
    if (ratio < lo || ratio > hi) rep.pass = false;
  };

  for (const auto& comp : complement_components(seg_g)) {
    const Real len = comp.length();
    const Real delta = (std::min)(Real("1e-6"), len / 1000);
    probe(comp.left, Side::Right);
    probe(comp.right, Side::Left);
    probe(mod1(comp.left + delta), Side::Right);
    probe(mod1(comp.right - delta), Side::Left);
    for (int t = 0; t < samples_per_component; ++t)
      probe(comp.at(Real(2 * t + 1) / (2 * samples_per_component)), Side::Right);
  }
  rep.max_dg = max_dg;
  rep.additive_bound = (exp(2 * eps) - 1) * max_dg;
  // exp(2 eps) - 1 < 3 eps only holds for eps < ~0.4185; outside that range
  // the comparison is vacuous and only reported
  if (eps > 0 && eps < Real("0.4") &&
      !(rep.additive_bound < 3 * eps * max_dg))
    rep.pass = false;
  return rep;
}

void require_cert(const CertReport& rep) {
  if (!rep.pass)
    throw Error(Errc::CertificateFailed,
                rep.bound_type + " certificate failed: worst ratio " +
                    to_decimal_string(rep.worst_ratio) + " at " +
                    to_decimal_string(rep.worst_point));
}

// ---- blends ---------------------------------------------------------------

Real RealBlend::eval(const Real& x) const {
  if (x < -1) return alpha * x;
  if (x > 1) return beta * x;
  return (beta - alpha) / 4 * x * x + (beta + alpha) / 2 * x + (beta - alpha) / 4;
}

Real RealBlend::deriv(const Real& x) const {
  if (x < -1) return alpha;
  if (x > 1) return beta;
  return (beta - alpha) / 2 * x + (beta + alpha) / 2;
}

RealBlend blend(const Real& alpha, const Real& beta) {
  if (!(alpha > 0) || !(beta > 0))
    throw Error(Errc::InvalidInput, "blend slopes must be positive");
  return {alpha, beta};
}

bool blend_ratio_bound_check(const Real& a, const Real& b, const Real& c,
                             const Real& d, int grid) {
  RealBlend num = blend(a, b), den = blend(c, d);
  const Real lo = (std::min)(a / c, b / d);
  const Real hi = (std::max)(a / c, b / d);
  const Real slack = Real("1e-30");
  for (int i = 0; i <= grid; ++i) {
    Real x = -2 + Real(4 * i) / grid;
    Real ratio = num.deriv(x) / den.deriv(x);
    if (ratio < lo - slack || ratio > hi + slack) return false;
  }
  Real mediant = (a + b) / (c + d);
  return mediant >= lo - slack && mediant <= hi + slack;
}

LocalBlend localized_blend(const BlendSpec& spec) {
  if (!(spec.alpha > 0) || !(spec.beta > 0) || !(spec.radius > 0))
    throw Error(Errc::InvalidInput, "blend spec needs positive slopes/radius");
  for (const Real& b : spec.host.breakpoints()) {
    Real d = circle_dist(b, spec.center);
    if (d > 0 && d < spec.radius)
      throw Error(Errc::PreconditionFailed,
                  "blend window contains another breakpoint");
  }
  Real hx = spec.host.eval(spec.center);
  return {spec.alpha, spec.beta, spec.center, spec.radius, hx};
}

Real LocalBlend::eval(const Real& z) const {
  // B^-1(h_{alpha,beta}(A(z))) with A, B both of slope 1/radius
  RealBlend h{alpha, beta};
  return host_at_center + radius * h.eval((z - center) / radius);
}

Real LocalBlend::deriv(const Real& z) const {
  RealBlend h{alpha, beta};
  return h.deriv((z - center) / radius);
}

// ---- linearization ---------------------------------------------------------

namespace {

struct LinWindow {
  long i;          // orbit index
  Real center;     // circle point
  Real t;          // inner radius
  Real R;          // outer radius (2t)
  Real M;          // cumulative slope product df^i(x)
  Real wind;       // lift winding: F^i(base) - center
  Real inner_lo, inner_hi;  // image of the inner window under phi (local frame)
  DerivProfile left_collar, right_collar;
  Real left_edge() const { return mod1(center - R); }
};

class OrbitLinearizerNode final : public MapNode {
 public:
  OrbitLinearizerNode(CircleDiffeo f, Real base, std::vector<LinWindow> ws)
      : f_(std::move(f)), base_(std::move(base)), windows_(std::move(ws)) {
    order_.resize(windows_.size());
    for (size_t q = 0; q < windows_.size(); ++q) order_[q] = q;
    std::sort(order_.begin(), order_.end(), [&](size_t u, size_t v) {
      return windows_[u].left_edge() < windows_[v].left_edge();
    });
  }

  Real lift(const Real& x) const override {
    const LinWindow* w = find(mod1(x));
    if (!w) return x;
    Real z = local_coord(*w, x);
    return x + (eval_local(*w, z) - z);
  }

  Real lift_deriv(const Real& x, Side) const override {
    const LinWindow* w = find(mod1(x));
    if (!w) return Real(1);
    Real z = local_coord(*w, x);
    if (z <= w->center - w->t) return w->left_collar.deriv(z);
    if (z >= w->center + w->t) return w->right_collar.deriv(z);
    Real u0 = base_ + (z - w->center) / w->M;
    return orbit_derivative(f_, w->i, u0) / w->M;
  }

  Real invert_lift(const Real& y) const override {
    const LinWindow* w = find(mod1(y));  // phi(U_i) = U_i
    if (!w) return y;
    Real v = local_coord(*w, y);
    Real z;
    if (v < w->inner_lo) {
      z = w->left_collar.invert(v);
    } else if (v > w->inner_hi) {
      z = w->right_collar.invert(v);
    } else {
      Real u0 = orbit_point(f_, -w->i, v + w->wind);
      z = w->center + (u0 - base_) * w->M;
    }
    return y + (z - v);
  }

  Smoothness smoothness() const override { return Smoothness::C1; }
  const char* kind() const override { return "orbit_linearizer"; }

 private:
  CircleDiffeo f_;
  Real base_;
  std::vector<LinWindow> windows_;
  std::vector<size_t> order_;

  const LinWindow* find(const Real& u) const {
    if (windows_.empty()) return nullptr;
    // last window whose left edge is <= u, cyclically
    size_t lo = 0, hi = order_.size() - 1;
    const Real first_edge = windows_[order_[0]].left_edge();
    size_t cand;
    if (u < first_edge) {
      cand = order_.back();
    } else {
      while (lo < hi) {
        size_t mid = (lo + hi + 1) / 2;
        if (windows_[order_[mid]].left_edge() <= u) lo = mid; else hi = mid - 1;
      }
      cand = order_[lo];
    }
    const LinWindow& w = windows_[cand];
    return arc_length_ccw(w.left_edge(), u) < 2 * w.R ? &w : nullptr;
  }

  // real coordinate near the window center representing x
  static Real local_coord(const LinWindow& w, const Real& x) {
    Real left = w.center - w.R;
    return left + mod1(x - left);
  }

  Real eval_local(const LinWindow& w, const Real& z) const {
    if (z <= w.center - w.t) return w.left_collar.eval(z);
    if (z >= w.center + w.t) return w.right_collar.eval(z);
    Real u0 = base_ + (z - w.center) / w.M;
    return orbit_point(f_, w.i, u0) - w.wind;
  }
};

}  // namespace

Real default_linearization_radius(const OrbitSegment& seg) {
  std::vector<Real> pts = seg.points;
  pts.push_back(seg.map.eval(pts.back()));
  std::sort(pts.begin(), pts.end());
  Real min_gap = 1 + pts.front() - pts.back();
  for (size_t t = 0; t + 1 < pts.size(); ++t)
    min_gap = (std::min)(min_gap, pts[t + 1] - pts[t]);
  Real M(1), Mmax(1), Mmin(1);
  for (long i = 0; i <= seg.n; ++i) {
    M *= seg.map.deriv(seg.points[i], Side::Right);
    Mmax = (std::max)(Mmax, M);
    Mmin = (std::min)(Mmin, M);
  }
  // outer windows have radius 2 M_i T with T = t / min M; keep them under
  // a fifth of the smallest gap
  return min_gap / 10 / (Mmax / Mmin);
}

Linearization linearize_near_segment(const CircleDiffeo& f,
                                     const OrbitSegment& seg, const Real& t) {
  if (!(t > 0)) throw Error(Errc::InvalidInput, "need t > 0");
  const long n = seg.n;
  std::vector<Real> pts = seg.points;
  pts.push_back(f.eval(pts.back()));
  std::vector<Real> m(n + 2), M(n + 2);
  M[0] = 1;
  for (long i = 0; i <= n + 1; ++i) {
    m[i] = f.deriv(pts[i], Side::Right);
    if (i <= n) M[i + 1] = M[i] * m[i];
  }
  Real Mmin = M[0];
  for (long i = 0; i <= n + 1; ++i) Mmin = (std::min)(Mmin, M[i]);
  const Real T = t / Mmin;  // seed radius: window i gets radius M_i T >= t

  std::vector<CircleArc> outer;
  outer.reserve(n + 2);
  for (long i = 0; i <= n + 1; ++i)
    outer.emplace_back(mod1(pts[i] - 2 * M[i] * T), mod1(pts[i] + 2 * M[i] * T));
  if (!pairwise_disjoint(outer))
    throw Error(Errc::WindowsOverlap, "linearization windows overlap at t=" +
                                          to_decimal_string(t));

  const Real base = seg.points[0];
  std::vector<LinWindow> ws;
  ws.reserve(n + 2);
  for (long i = 0; i <= n + 1; ++i) {
    Real ti = M[i] * T;
    Real Fi = orbit_point(f, i, base);
    Real center = pts[i];
    Real wind = Fi - center;
    Real vl = orbit_point(f, i, base - T) - wind;
    Real vr = orbit_point(f, i, base + T) - wind;
    Real dl = orbit_derivative(f, i, base - T) / M[i];
    Real dr = orbit_derivative(f, i, base + T) / M[i];
    LinWindow w{i, center, ti, 2 * ti, M[i], wind, vl, vr,
                monotone_c1_bridge(center - 2 * ti, center - ti,
                                   center - 2 * ti, vl, Real(1), dl),
                monotone_c1_bridge(center + ti, center + 2 * ti,
                                   vr, center + 2 * ti, dr, Real(1))};
    ws.push_back(std::move(w));
  }

  Linearization out;
  out.phi = CircleDiffeo(std::make_shared<OrbitLinearizerNode>(f, base, std::move(ws)));
  out.f_lin = conjugate(inverse(out.phi), f);
  out.seed_radius = T;
  out.window_radii.resize(n + 2);
  for (long i = 0; i <= n + 1; ++i) out.window_radii[i] = M[i] * T;
  return out;
}

// ---- smoothing -------------------------------------------------------------

Real default_smoothing_radius(const OrbitSegment& seg, const Real& seed_radius) {
  std::vector<Real> pts = seg.points;
  std::sort(pts.begin(), pts.end());
  Real min_gap = 1 + pts.front() - pts.back();
  for (size_t t = 0; t + 1 < pts.size(); ++t)
    min_gap = (std::min)(min_gap, pts[t + 1] - pts[t]);
  Real Mmax(1), M(1);
  for (long i = 0; i <= seg.n; ++i) {
    M *= seg.map.deriv(seg.points[i], Side::Right);
    Mmax = (std::max)(Mmax, M);
  }
  Real by_gap = min_gap / 10 / (std::max)(Real(1), Mmax);
  return (std::min)(seed_radius / 2, by_gap);
}

CircleDiffeo smooth_conjugacy(const PwAffineHomeo& H, const CircleDiffeo& f_lin,
                              const OrbitSegment& seg, const Real& eta,
                              SmoothingReport* report) {
  const long n = seg.n;
  if (!(eta > 0)) throw Error(Errc::InvalidInput, "need eta > 0");
  // sorted breakpoints with their orbit indices
  const std::vector<Real>& bps = H.breakpoints();
  const std::vector<Real>& ims = H.images();
  const std::vector<Real> slopes = H.slopes();
  const size_t m = bps.size();
  if (m != static_cast<size_t>(n + 1))
    throw Error(Errc::InvalidInput, "H must interpolate the segment points");
  // orbit index of each sorted breakpoint
  std::vector<long> orbit_index(m);
  {
    std::vector<std::pair<Real, long>> tagged(m);
    for (long i = 0; i <= n; ++i) tagged[i] = {seg.points[i], i};
    std::sort(tagged.begin(), tagged.end());
    for (size_t q = 0; q < m; ++q) {
      if (!(tagged[q].first == bps[q]))
        throw Error(Errc::PreconditionFailed, "H breakpoints are not the segment");
      orbit_index[q] = tagged[q].second;
    }
  }
  // propagated window radii eta_i = df^i(x) * eta
  std::vector<Real> eta_at(m);
  {
    std::vector<Real> M(n + 1);
    M[0] = 1;
    for (long i = 0; i < n; ++i)
      M[i + 1] = M[i] * f_lin.deriv(seg.points[i], Side::Right);
    for (size_t q = 0; q < m; ++q) eta_at[q] = M[orbit_index[q]] * eta;
  }
  // window constraints: stay inside the adjacent affine pieces, and f_lin
  // must be affine across each window
  for (size_t q = 0; q < m; ++q) {
    Real gap_r = arc_length_ccw(bps[q], bps[(q + 1) % m]);
    Real gap_l = arc_length_ccw(bps[(q + m - 1) % m], bps[q]);
    if (!(eta_at[q] < gap_r / 2) || !(eta_at[q] < gap_l / 2))
      throw Error(Errc::PreconditionFailed,
                  "smoothing windows overlap; eta too large");
    Real d0 = f_lin.deriv(bps[q], Side::Right);
    Real dl = f_lin.deriv(mod1(bps[q] - eta_at[q] * Real("0.999")), Side::Right);
    Real dr = f_lin.deriv(mod1(bps[q] + eta_at[q] * Real("0.999")), Side::Right);
    if (abs(dl - d0) > abs(d0) * Real("1e-20") ||
        abs(dr - d0) > abs(d0) * Real("1e-20"))
      throw Error(Errc::PreconditionFailed,
                  "f_lin is not affine across a smoothing window");
  }

  // assemble the blended map: interior breakpoints are replaced by ramps
  std::vector<PwQuadNode::Node> nodes;
  nodes.reserve(2 * m);
  // lift values of H at breakpoints, unrolled
  std::vector<Real> F(m);
  F[0] = ims[0];
  for (size_t q = 1; q < m; ++q)
    F[q] = F[q - 1] + arc_length_ccw(ims[q - 1], ims[q]);
  auto push_node = [&](Real x, Real Fv, const Real& dl, const Real& dr) {
    // ramp nodes around the extreme breakpoints may wrap past 0 or 1
    if (x < 0) { x += 1; Fv += 1; }
    else if (x >= 1) { x -= 1; Fv -= 1; }
    nodes.push_back({x, Fv, dl, dr});
  };
  for (size_t q = 0; q < m; ++q) {
    const Real alpha = slopes[(q + m - 1) % m];  // left slope at bps[q]
    const Real beta = slopes[q];                 // right slope
    const long idx = orbit_index[q];
    const bool endpoint = (idx == 0 || idx == n);
    if (endpoint || alpha == beta) {
      push_node(bps[q], F[q], alpha, beta);
    } else {
      push_node(bps[q] - eta_at[q], F[q] - alpha * eta_at[q], alpha, alpha);
      push_node(bps[q] + eta_at[q], F[q] + beta * eta_at[q], beta, beta);
    }
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const PwQuadNode::Node& a, const PwQuadNode::Node& b) { return a.x < b.x; });
  CircleDiffeo h_eta(std::make_shared<PwQuadNode>(std::move(nodes)));

  if (report) {
    CircleDiffeo conj_H = conjugate(H.as_diffeo(), f_lin);
    CircleDiffeo conj_h = conjugate(h_eta, f_lin);
    // the proposition's hypothesis quantity: max one-sided derivative gap of
    // H f_lin H^-1 over the circle (it jumps only at the image points)
    Real eps(0);
    for (size_t q = 0; q < m; ++q) {
      Real dl = conj_H.node().lift_deriv(ims[q], Side::Left);
      Real dr = conj_H.node().lift_deriv(ims[q], Side::Right);
      eps = (std::max)(eps, abs(dr - dl));
    }
    report->epsilon = eps;
    report->worst_gap = Real(0);
    report->worst_point = Real(0);
    report->samples = 0;
    auto probe = [&](const Real& z, Side side) {
      Real gap = abs(conj_h.node().lift_deriv(z, side) -
                     conj_H.node().lift_deriv(z, side));
      ++report->samples;
      if (gap > report->worst_gap) {
        report->worst_gap = gap;
        report->worst_point = mod1(z);
      }
    };
    std::vector<Real> sorted_ims = ims;
    std::sort(sorted_ims.begin(), sorted_ims.end());
    for (size_t q = 0; q < m; ++q) {
      CircleArc comp(sorted_ims[q], sorted_ims[(q + 1) % m]);
      const Real len = comp.length();
      const Real delta = (std::min)(Real("1e-6"), len / 1000);
      probe(comp.left, Side::Right);
      probe(comp.right, Side::Left);
      probe(mod1(comp.left + delta), Side::Right);
      probe(mod1(comp.right - delta), Side::Left);
      for (int t = 0; t < 64; ++t) probe(comp.at(Real(2 * t + 1) / 128), Side::Right);
    }
    // focus samples across each blend-window image
    for (size_t q = 0; q < m; ++q) {
      const long idx = orbit_index[q];
      if (idx == 0 || idx == n) continue;
      const Real alpha = slopes[(q + m - 1) % m];
      const Real beta = slopes[q];
      for (int t = 1; t < 16; ++t) {
        Real span = alpha * eta_at[q] + beta * eta_at[q];
        Real z = mod1(ims[q] - alpha * eta_at[q] + span * Real(t) / 16);
        probe(z, Side::Right);
      }
    }
    // allow for eps = 0 exactly (H already smooth): both sides vanish
    const Real slack = pow(Real(2), -static_cast<int>(precision_bits() / 2));
    report->pass = report->worst_gap < 2 * eps + slack;
  }
  return h_eta;
}

}  // namespace circdiff
