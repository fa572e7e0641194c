#include "circdiff/ratio_perturbation.hpp"

#include <algorithm>

namespace circdiff {

namespace {
Real cross_ratio(const Real& t) { return t / (1 - t); }
Real from_cross_ratio(const Real& r) { return r / (1 + r); }
}  // namespace

UnitDiffeo one_step_ratio_map(const Real& t, const Real& eps, const Real& y) {
  if (!(eps > 0) || !(eps < Real(1) / 2))
    throw Error(Errc::EpsTooLarge, "one-step map needs 0 < eps < 1/2");
  if (!(y > 0) || !(y < 1))
    throw Error(Errc::InvalidInput, "y must be interior to (0,1)");
  if (!(abs(t) <= 1))
    throw Error(Errc::InvalidInput, "|t| <= 1 required");
  if (t == 0) return unit_identity();
  const Real y1 = (1 + t * eps) * y / (1 + t * eps * y);
  const Real sigma_l = y1 / y;
  const Real sigma_r = (1 - y1) / (1 - y);
  const Real dy = (sigma_l + sigma_r) / 2;
  const Real band = 2 * eps;  // C1 budget

  Real kappa("0.08"), mu("0.0625");
  for (int attempt = 0; attempt < 8; ++attempt) {
    Real d0 = kappa * y;        // identity collar [0, d0]
    Real d1 = kappa * (1 - y);  // identity collar [1 - d1, 1]
    try {
      DerivProfile left = plateau_bridge(d0, y, d0, y1, Real(1), dy, mu);
      DerivProfile right = plateau_bridge(y, 1 - d1, y1, 1 - d1, dy, Real(1), mu);
      std::vector<Real> nodes{Real(0)};
      std::vector<Real> dvals{Real(1)};
      auto append = [&](const DerivProfile& p) {
        for (size_t q = 0; q < p.nodes().size(); ++q) {
          if (!nodes.empty() && nodes.back() == p.nodes()[q]) continue;
          nodes.push_back(p.nodes()[q]);
          dvals.push_back(p.dvals()[q]);
        }
      };
      append(left);
      append(right);
      nodes.push_back(Real(1));
      dvals.push_back(Real(1));
      // keep the derivative band strictly inside (1 - 2eps, 1 + 2eps)
      bool ok = true;
      for (const Real& d : dvals)
        if (abs(d - 1) > band * Real("0.995")) ok = false;
      if (!ok) {
        kappa /= 2;
        mu /= 2;
        continue;
      }
      DerivProfile full(std::move(nodes), std::move(dvals), Real(0));
      UnitDiffeo phi = unit_from_profile(std::move(full));
      return phi;
    } catch (const Error& e) {
      if (e.code() != Errc::InfeasibleProfile) throw;
      kappa /= 2;
      mu /= 2;
    }
  }
  throw Error(Errc::EpsTooLarge, "one-step profile cannot stay within 2 eps");
}

Real plan_ratio_path(const Real& r_from, const Real& r_to, const Real& eps, long w) {
  if (!(r_from > 0) || !(r_to > 0))
    throw Error(Errc::InvalidInput, "ratios must be positive");
  if (!(eps > 0) || !(eps < 1))
    throw Error(Errc::InvalidInput, "need 0 < eps < 1");
  const Real q = r_to / r_from;
  auto needed = [&](void) -> long {
    Real lq = abs(log(q));
    Real denom = q > 1 ? log(1 + eps / 2) : -log(1 - eps / 2);
    return static_cast<long>(ceil(lq / denom));
  };
  if (w < 1) {
    if (q == 1) return Real(0);
    throw InfeasibleError("ratio path needs at least one wandering window",
                          (std::max)(needed(), 1L));
  }
  Real t = (pow(q, Real(1) / w) - 1) * 2 / eps;
  if (abs(t) > 1)
    throw InfeasibleError("ratio quotient outside the reachable window",
                          needed());
  return t;
}

Real composition_distortion_constant(const CircleDiffeo& g, const CircleArc& I,
                                     long w, int samples) {
  if (w < 0) throw Error(Errc::InvalidInput, "need w >= 0");
  if (static_cast<int>(g.smoothness()) < static_cast<int>(Smoothness::C2))
    throw Error(Errc::PreconditionFailed,
                "distortion constant needs a C2 map");
  std::vector<CircleArc> iters;
  CircleArc cur = I;
  for (long j = 0; j <= w; ++j) {
    iters.push_back(cur);
    cur = CircleArc(g.eval(cur.left), g.eval(cur.right));
  }
  if (!pairwise_disjoint(iters))
    throw Error(Errc::IteratesOverlap, "iterates of I overlap before w");
  Real worst(0);
  for (long j = 1; j <= w; ++j) {
    Real lo, hi;
    bool first = true;
    for (int q = 0; q <= samples; ++q) {
      Real x = I.at(Real(q) / samples);
      Real ld = log(orbit_derivative(g, j, x));
      if (first || ld < lo) lo = ld;
      if (first || ld > hi) hi = ld;
      first = false;
    }
    worst = (std::max)(worst, hi - lo);
  }
  return exp(worst);
}

UnitDiffeo match_endpoints(const UnitDiffeo& H_raw, const UnitDiffeo& G,
                           const Real& delta) {
  if (!(delta > 0) || !(delta < Real(1) / 4))
    throw Error(Errc::InvalidInput, "need 0 < delta < 1/4");
  const Real a = delta, b = 2 * delta, c = 1 - 2 * delta, d = 1 - delta;
  const Real Ga = G.eval(a), Gd = G.eval(d);
  const Real Hb = H_raw.eval(b), Hc = H_raw.eval(c);
  if (!(Ga < Hb) || !(Hb < Hc) || !(Hc < Gd))
    throw Error(Errc::PreconditionFailed,
                "maps too far apart to bridge at this delta");
  auto local_bridge = [](const Real& x0, const Real& x1, const Real& v0,
                         const Real& v1, const Real& s0, const Real& s1) {
    DerivProfile glob = monotone_c1_bridge(x0, x1, v0, v1, s0, s1);
    // rescale to a unit profile
    std::vector<Real> nodes, dvals;
    const Real span_x = x1 - x0, span_v = v1 - v0;
    for (size_t q = 0; q < glob.nodes().size(); ++q) {
      nodes.push_back((glob.nodes()[q] - x0) / span_x);
      dvals.push_back(glob.dvals()[q] * span_x / span_v);
    }
    nodes.front() = 0;
    nodes.back() = 1;
    return unit_from_profile(DerivProfile(nodes, dvals, Real(0)));
  };
  std::vector<UnitPiece> pieces;
  pieces.push_back({Real(0), a, Real(0), Ga, unit_restrict(G, Real(0), a)});
  pieces.push_back({a, b, Ga, Hb,
                    local_bridge(a, b, Ga, Hb, G.deriv(a, Side::Right),
                                 H_raw.deriv(b, Side::Right))});
  pieces.push_back({b, c, Hb, Hc, unit_restrict(H_raw, b, c)});
  pieces.push_back({c, d, Hc, Gd,
                    local_bridge(c, d, Hc, Gd, H_raw.deriv(c, Side::Right),
                                 G.deriv(d, Side::Right))});
  pieces.push_back({d, Real(1), Gd, Real(1), unit_restrict(G, d, Real(1))});
  return unit_piecewise(std::move(pieces));
}

WindowPath solve_window_path(const std::vector<UnitDiffeo>& G, const Real& t1,
                             const Real& t2, const Real& eps) {
  const long w = static_cast<long>(G.size());
  if (w < 1) throw InfeasibleError("no windows to perturb through", 1);
  auto flow = [&](const Real& t_param, std::vector<UnitDiffeo>* factors) {
    Real tau = t1;
    if (factors) factors->clear();
    for (long j = 0; j < w; ++j) {
      Real sigma = G[j].eval(tau);
      UnitDiffeo phi = (t_param == 0)
                           ? unit_identity()
                           : one_step_ratio_map(t_param, eps / 2, sigma);
      tau = phi.eval(sigma);
      if (factors) factors->push_back(unit_compose({{phi, false}, {G[j], false}}));
    }
    return tau;
  };
  // feasibility estimate from the unperturbed flow
  Real pure = flow(Real(0), nullptr);
  plan_ratio_path(cross_ratio(pure), cross_ratio(t2), eps, w);
  Real lo(-1), hi(1);
  Real flo = flow(lo, nullptr), fhi = flow(hi, nullptr);
  if (t2 < flo || t2 > fhi)
    throw InfeasibleError("target not reachable with |t| <= 1 at this w",
                          w + 1);
  // bisection on the monotone step parameter
  const Real tol = pow(Real(2), -static_cast<int>(precision_bits() * 2 / 3));
  Real mid(0);
  for (int iter = 0; iter < static_cast<int>(precision_bits()) + 16; ++iter) {
    mid = (lo + hi) / 2;
    Real v = flow(mid, nullptr);
    if (abs(v - t2) <= tol) break;
    if (v < t2) lo = mid; else hi = mid;
  }
  WindowPath out;
  out.t_param = mid;
  out.t1 = t1;
  out.t2 = t2;
  Real final_v = flow(mid, &out.factors);
  if (abs(final_v - t2) > pow(Real(2), -static_cast<int>(precision_bits() / 2)))
    throw Error(Errc::NoConvergence, "window path solve did not converge");
  return out;
}

// ---- patched circle maps ---------------------------------------------------

namespace {

class PatchedCircleNode final : public MapNode {
 public:
  PatchedCircleNode(CircleDiffeo base, std::vector<CirclePatch> patches)
      : base_(std::move(base)), patches_(std::move(patches)) {
    std::vector<CircleArc> srcs, dsts;
    for (const auto& p : patches_) {
      srcs.push_back(p.src);
      dsts.push_back(p.dst);
    }
    if (!pairwise_disjoint(srcs) || !pairwise_disjoint(dsts))
      throw Error(Errc::WindowsOverlap, "patch windows overlap");
    src_order_.resize(patches_.size());
    dst_order_.resize(patches_.size());
    for (size_t q = 0; q < patches_.size(); ++q) src_order_[q] = dst_order_[q] = q;
    std::sort(src_order_.begin(), src_order_.end(), [&](size_t u, size_t v) {
      return patches_[u].src.left < patches_[v].src.left;
    });
    std::sort(dst_order_.begin(), dst_order_.end(), [&](size_t u, size_t v) {
      return patches_[u].dst.left < patches_[v].dst.left;
    });
  }

  Real lift(const Real& x) const override {
    Real bx = base_.lift(x);
    const CirclePatch* p = find_src(mod1(x));
    if (!p) return bx;
    Real t = arc_length_ccw(p->src.left, mod1(x)) / p->src.length();
    Real v = mod1(p->dst.left + p->local.eval(t) * p->dst.length());
    return bx + signed_gap(mod1(bx), v);
  }

  Real lift_deriv(const Real& x, Side side) const override {
    const CirclePatch* p = find_src(mod1(x));
    if (!p) return base_.node().lift_deriv(x, side);
    Real t = arc_length_ccw(p->src.left, mod1(x)) / p->src.length();
    if (t > 1) t = 1;
    return p->local.deriv(t, side) * p->dst.length() / p->src.length();
  }

  Real invert_lift(const Real& y) const override {
    Real bx = base_.lift_invert(y);
    const CirclePatch* p = find_dst(mod1(y));
    if (!p) return bx;
    Real t = arc_length_ccw(p->dst.left, mod1(y)) / p->dst.length();
    Real u = mod1(p->src.left + p->local.invert(t) * p->src.length());
    return bx + signed_gap(mod1(bx), u);
  }

  Smoothness smoothness() const override {
    return min_smoothness(base_.smoothness(), Smoothness::C1);
  }

  std::vector<Real> breakpoints() const override { return base_.breakpoints(); }
  const char* kind() const override { return "patched"; }
  const CircleDiffeo& base() const { return base_; }
  const std::vector<CirclePatch>& patches() const { return patches_; }

 private:
  CircleDiffeo base_;
  std::vector<CirclePatch> patches_;
  std::vector<size_t> src_order_, dst_order_;

  static Real signed_gap(const Real& from, const Real& to) {
    Real d = mod1(to - from);
    if (d > Real(1) / 2) d -= 1;
    return d;
  }

  const CirclePatch* lookup(const std::vector<size_t>& order, const Real& u,
                            bool by_dst) const {
    if (patches_.empty()) return nullptr;
    auto left_of = [&](size_t q) {
      return by_dst ? patches_[q].dst.left : patches_[q].src.left;
    };
    size_t lo = 0, hi = order.size() - 1;
    size_t cand;
    if (u < left_of(order[0])) {
      cand = order.back();
    } else {
      while (lo < hi) {
        size_t mid = (lo + hi + 1) / 2;
        if (left_of(order[mid]) <= u) lo = mid; else hi = mid - 1;
      }
      cand = order[lo];
    }
    const CircleArc& arc = by_dst ? patches_[cand].dst : patches_[cand].src;
    if (arc_length_ccw(arc.left, u) < arc.length()) return &patches_[cand];
    return nullptr;
  }
  const CirclePatch* find_src(const Real& u) const {
    return lookup(src_order_, u, false);
  }
  const CirclePatch* find_dst(const Real& u) const {
    return lookup(dst_order_, u, true);
  }
};

}  // namespace

CircleDiffeo patched_circle_map(const CircleDiffeo& base,
                                std::vector<CirclePatch> patches) {
  return CircleDiffeo(
      std::make_shared<PatchedCircleNode>(base, std::move(patches)));
}

PerturbationResult perturb_to_ratios(const CircleDiffeo& g, const Real& y,
                                     long k, long w, const Real& target_R0,
                                     const Real& target_Rn, const Real& eps) {
  OrbitSegment seg = orbit_segment(g, y, k);
  const AdaptedSegment ana = require_adapted(analyze(seg));
  PerturbationPlan plan;
  plan.k = k;
  plan.w = w;
  plan.eps = eps;
  plan.target_R0 = target_R0;
  plan.target_Rn = target_Rn;

  const Real rel_tol = pow(Real(2), -static_cast<int>(precision_bits() * 3 / 5));
  if (abs(target_R0 - ana.R0) / ana.R0 < rel_tol &&
      abs(target_Rn - ana.Rn) / ana.Rn < rel_tol) {
    // already on target: the t = 0 path leaves g untouched
    plan.feasible = true;
    plan.t_initial = plan.t_final = Real(0);
    plan.achieved_R0 = ana.R0;
    plan.achieved_Rn = ana.Rn;
    plan.c1_sup = plan.c1_deriv = Real(0);
    plan.order_preserved = true;
    return {g, mod1(y), plan};
  }
  if (w < 1)
    throw InfeasibleError("perturbation needs at least one wandering window", 1);

  const long n = k;
  const long r = n - ana.j;  // index of the left neighbor of y
  const long s = n - ana.i;  // index of the right neighbor of y
  CircleArc I(seg.points[r], seg.points[s]);
  CircleArc J(ana.c, ana.d);

  // wandering family I, g(I), ..., g^w(I), g^-w(J), ..., J must be disjoint
  {
    std::vector<CircleArc> fam;
    CircleArc cur = I;
    for (long j = 0; j <= w; ++j) {
      fam.push_back(cur);
      cur = CircleArc(g.eval(cur.left), g.eval(cur.right));
    }
    cur = J;
    for (long j = 0; j <= w; ++j) {
      fam.push_back(cur);
      cur = CircleArc(g.invert(cur.left), g.invert(cur.right));
    }
    fam.pop_back();  // g^-w(J) counted once
    if (!pairwise_disjoint(fam))
      throw Error(Errc::IteratesOverlap,
                  "wandering windows overlap; w too large for this segment");
  }

  // forward family: windows g^j(I), j = 0..w
  std::vector<CircleArc> WI{I};
  for (long j = 0; j < w; ++j)
    WI.push_back(CircleArc(g.eval(WI.back().left), g.eval(WI.back().right)));
  std::vector<UnitDiffeo> GI;
  for (long j = 0; j < w; ++j) GI.push_back(rescale_to_unit(g, WI[j], WI[j + 1]));
  const Real t1 = from_cross_ratio(target_R0);
  const Real t2 =
      arc_length_ccw(WI[w].left, mod1(orbit_point(g, w, y))) / WI[w].length();
  WindowPath fwd = solve_window_path(GI, t1, t2, eps);
  plan.t_initial = fwd.t_param;

  // backward family through the inverse map: windows g^-j(J)
  CircleDiffeo g_inv = inverse(g);
  std::vector<CircleArc> WJ{J};
  for (long j = 0; j < w; ++j)
    WJ.push_back(CircleArc(g.invert(WJ.back().left), g.invert(WJ.back().right)));
  std::vector<UnitDiffeo> GJ;
  for (long j = 0; j < w; ++j)
    GJ.push_back(rescale_to_unit(g_inv, WJ[j], WJ[j + 1]));
  const Real th1 = from_cross_ratio(target_Rn);
  const Real th2 =
      arc_length_ccw(WJ[w].left, mod1(orbit_point(g, n - w, y))) / WJ[w].length();
  WindowPath bwd = solve_window_path(GJ, th1, th2, eps);
  plan.t_final = bwd.t_param;
  plan.feasible = true;

  // assemble: forward factors replace g on g^j(I); backward factors replace
  // the inverse map on g^-j(J), i.e. g on g^-(j+1)(J) with the local inverse
  std::vector<CirclePatch> patches;
  for (long j = 0; j < w; ++j)
    patches.push_back({WI[j], WI[j + 1], fwd.factors[j]});
  for (long j = 0; j < w; ++j)
    patches.push_back({WJ[j + 1], WJ[j], unit_inverse(bwd.factors[j])});
  CircleDiffeo g1 = patched_circle_map(g, patches);

  const Real y1 = I.at(t1);

  // certificates
  C1Distance dist = c1_distance(g1, g, 2048);
  plan.c1_sup = dist.sup;
  plan.c1_deriv = dist.deriv;
  OrbitSegment seg1 = orbit_segment(g1, y1, k);
  plan.order_preserved = similarly_ordered(seg, seg1);
  AnalyzeResult ana1 = analyze(seg1);
  plan.achieved_R0 = analysis_R0(ana1);
  plan.achieved_Rn = analysis_Rn(ana1);
  if (!plan.order_preserved)
    throw Error(Errc::CertificateFailed, "perturbed segment changed its order");
  if (!is_adapted(ana1))
    throw Error(Errc::NotAdapted, "perturbed segment lost adaptedness");
  if (abs(plan.achieved_R0 - target_R0) > Real("1e-9") ||
      abs(plan.achieved_Rn - target_Rn) > Real("1e-9"))
    throw Error(Errc::CertificateFailed, "perturbed ratios missed their targets");
  if (dist.sup > eps || dist.deriv > eps)
    throw Error(Errc::CertificateFailed,
                "perturbation exceeded its C1 budget: sup " +
                    to_decimal_string(dist.sup) + ", deriv " +
                    to_decimal_string(dist.deriv));
  return {g1, y1, plan};
}

}  // namespace circdiff
