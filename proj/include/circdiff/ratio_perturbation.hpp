#pragma once

#include "circdiff/adapted_segments.hpp"
#include "circdiff/circle_map.hpp"
#include "circdiff/metrics.hpp"
#include "circdiff/unit_diffeo.hpp"

namespace circdiff {

// Diffeomorphism of [0,1], identity near 0 and 1, 2*eps-C1-close to the
// identity, moving the cross ratio at y exactly:
// phi(y)/(1-phi(y)) = (1 + t eps) y/(1-y). Requires eps < 1/2 (EpsTooLarge).
UnitDiffeo one_step_ratio_map(const Real& t, const Real& eps, const Real& y);

// Step parameter t in [-1,1] with (1 + t eps/2)^w = r_to/r_from. Throws
// InfeasibleError (carrying the minimal sufficient w) when the quotient is
// outside [(1-eps/2)^w, (1+eps/2)^w].
Real plan_ratio_path(const Real& r_from, const Real& r_to, const Real& eps, long w);

// log of the classical distortion constant: C = exp(max_{j<=w} De(g^j, I)).
// Requires the iterates g^j(I) pairwise disjoint (IteratesOverlap) and g at
// least C2 (PreconditionFailed).
Real composition_distortion_constant(const CircleDiffeo& g, const CircleArc& I,
                                     long w, int samples = 96);

// H equal to G on [0,delta] and [1-delta,1], equal to H_raw on
// [2delta, 1-2delta], C1-bridged in between.
UnitDiffeo match_endpoints(const UnitDiffeo& H_raw, const UnitDiffeo& G,
                           const Real& delta);

// One solved window family: factors H_j = phi_j . G_j with the same step
// parameter t at every window, composing to send t1 to t2 exactly.
struct WindowPath {
  Real t_param;
  Real t1, t2;
  std::vector<UnitDiffeo> factors;  // H_0 .. H_{w-1}
};

// Solves for the common step parameter (monotone in t, bisection to working
// precision). The G_j must fix 0 and 1; eps is the full per-factor budget
// (each one-step runs at eps/2).
WindowPath solve_window_path(const std::vector<UnitDiffeo>& G, const Real& t1,
                             const Real& t2, const Real& eps);

struct PerturbationPlan {
  long k = 0, w = 0;
  Real t_initial, t_final;  // step parameters of the two window families
  bool feasible = false;
  Real eps;
  Real target_R0, target_Rn;
  Real achieved_R0, achieved_Rn;
  Real c1_sup, c1_deriv;    // measured distance from g
  bool order_preserved = false;
};

struct PerturbationResult {
  CircleDiffeo g1;
  Real y1;  // base point of the re-based adapted segment
  PerturbationPlan plan;
};

// Perturbs g on the wandering windows of the characteristic segment at y so
// the segment through the shifted base point y1 has the prescribed initial
// and final ratios. The result equals g outside the 2w windows (shared
// representation nodes).
PerturbationResult perturb_to_ratios(const CircleDiffeo& g, const Real& y,
                                     long k, long w, const Real& target_R0,
                                     const Real& target_Rn, const Real& eps);

// Patched circle map node: equals `base` outside the windows, each window
// replaced by an affinely-chart-conjugated unit diffeomorphism onto the
// window's image arc. Exposed for the Denjoy module which reuses it.
struct CirclePatch {
  CircleArc src;
  CircleArc dst;
  UnitDiffeo local;
};

CircleDiffeo patched_circle_map(const CircleDiffeo& base,
                                std::vector<CirclePatch> patches);

}  // namespace circdiff
