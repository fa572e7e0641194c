#include "circdiff/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>

namespace circdiff {

namespace {

Real max_derivative(const CircleDiffeo& g, int grid = 512) {
  Real m(0);
  for (int i = 0; i < grid; ++i) {
    Real x = Real(i) / grid;
    for (Side s : {Side::Left, Side::Right})
      m = (std::max)(m, g.node().lift_deriv(x, s));
  }
  return m;
}

}  // namespace

ConjugacyOutcome conjugate_towards(const CircleDiffeo& f, const CircleDiffeo& g,
                                   const PipelineConfig& cfg) {
  if (!(cfg.eps > 0)) throw Error(Errc::InvalidInput, "need eps > 0");
  set_precision_bits(cfg.precision);
  PipelineReport rep;
  rep.eps = cfg.eps;
  rep.seed = cfg.seed;

  // rotation numbers must agree within the estimate resolution
  RotationInterval rf = estimate_rotation_number(f, cfg.rotnum_check_n);
  RotationInterval rg = estimate_rotation_number(g, cfg.rotnum_check_n);
  if (!rf.overlaps(rg) || !rf.contains(cfg.alpha) || !rg.contains(cfg.alpha))
    throw Error(Errc::RotationMismatch,
                "rotation-number estimates do not overlap at alpha");
  if (static_cast<int>(g.smoothness()) < static_cast<int>(Smoothness::C2))
    throw Error(Errc::PreconditionFailed,
                "target map must be C2 (a C2 representative is assumed given)");

  const Real M = max_derivative(g);
  rep.max_dg = M;
  const Real perturb_budget = cfg.perturb_budget > 0 ? cfg.perturb_budget : cfg.eps / 4;
  // the proof's chain asks for eps/(48 M); at desk scale that budget makes
  // the fragmentation astronomically fine, and the final distance is
  // certified directly anyway, so the default is the coarser eps/8
  const Real denjoy_budget =
      cfg.denjoy_budget > 0 ? cfg.denjoy_budget : cfg.eps / 8;
  const Real distortion_budget =
      cfg.distortion_budget > 0 ? cfg.distortion_budget : cfg.eps / (24 * M);

  // wandering reduction (Denjoy branch)
  CircleDiffeo f0 = f;
  CircleDiffeo h0 = identity_map();
  Real x0 = mod1(cfg.x);
  try {
    ReductionResult red =
        reduce_wandering_distortion(f, denjoy_budget, cfg.wandering_tau);
    f0 = red.g;
    h0 = red.h;
    rep.denjoy_applied = true;
    rep.denjoy_eps = denjoy_budget;
    // base point on the minimal set: a wandering-interval endpoint
    Real endpoint = red.certificates.front().arc.left;
    x0 = endpoint;
  } catch (const Error& e) {
    if (e.code() != Errc::NoWanderingDetected) throw;
  }

  AlphaRep alpha = AlphaRep::from_value(cfg.alpha);
  CharacteristicSchedule sched = characteristic_times(alpha, cfg.k_max + 1);

  std::optional<ConjugacyOutcome> best;
  for (const ScheduleEntry& entry : sched.entries) {
    if (!entry.adapted || entry.w < 1 || entry.k > cfg.k_max) continue;
    AttemptInfo att;
    att.k = entry.k;
    att.w = entry.w;
    const bool trace = std::getenv("CIRCDIFF_TRACE") != nullptr;
    auto tstage = std::chrono::steady_clock::now();
    auto lap = [&](const char* name) {
      if (!trace) return;
      auto now = std::chrono::steady_clock::now();
      std::cerr << "[k=" << entry.k << "] " << name << " "
                << std::chrono::duration<double>(now - tstage).count() << "s\n";
      tstage = now;
    };
    try {
      OrbitSegment seg_f = orbit_segment(f0, x0, entry.k);
      AnalyzeResult af = analyze(seg_f);
      att.adapted = is_adapted(af);
      if (!att.adapted) {
        att.note = "f segment not adapted at k";
        rep.attempts.push_back(att);
        continue;
      }
      const AdaptedSegment& adapted_f = std::get<AdaptedSegment>(af);

      lap("segment");
      PerturbationResult pert =
          perturb_to_ratios(g, cfg.y, entry.k, entry.w, adapted_f.R0,
                            adapted_f.Rn, perturb_budget);
      att.perturb_feasible = true;
      lap("perturb");

      OrbitSegment seg_g = orbit_segment(pert.g1, pert.y1, entry.k);
      const AdaptedSegment adapted_g = require_adapted(analyze(seg_g));

      PwAffineHomeo H = build_conjugacy(adapted_f, adapted_g);
      CertReport affine = conjugacy_derivative_certificate(
          H, f0, pert.g1, seg_f, seg_g, Real(0), 48);
      att.component_distortion = affine.epsilon;
      att.distortion_budget_met = affine.epsilon <= distortion_budget;
      att.l_affine_pass = affine.pass;
      lap("l_affine");

      Real t = default_linearization_radius(seg_f);
      Linearization lin = linearize_near_segment(f0, seg_f, t);
      Real eta = default_smoothing_radius(seg_f, lin.seed_radius);
      SmoothingReport smooth;
      lap("linearize");
      CircleDiffeo h_eta = smooth_conjugacy(H, lin.f_lin, seg_f, eta, &smooth);
      att.smoothing_pass = smooth.pass;
      lap("smooth");

      CircleDiffeo h_total = compose(
          {{h_eta, false}, {lin.phi, true}, {h0, false}});
      C1Distance final = c1_distance(conjugate(h_total, f), g, cfg.final_grid);
      lap("final_c1");
      att.final_sup = final.sup;
      att.final_deriv = final.deriv;
      att.success = affine.pass && smooth.pass && final.sup <= cfg.eps &&
                    final.deriv <= cfg.eps;
      rep.attempts.push_back(att);

      bool better = !best || final.deriv < best->report.final_deriv;
      if (att.success || better) {
        ConjugacyOutcome out;
        out.h = h_total;
        out.report = rep;
        out.report.k = entry.k;
        out.report.w = entry.w;
        out.report.target_R0 = adapted_f.R0;
        out.report.target_Rn = adapted_f.Rn;
        out.report.perturbation = pert.plan;
        out.report.l_affine = affine;
        out.report.smoothing = smooth;
        out.report.final_sup = final.sup;
        out.report.final_deriv = final.deriv;
        out.report.pass = att.success;
        best = std::move(out);
      }
      if (att.success) break;
    } catch (const InfeasibleError& e) {
      att.note = std::string("infeasible: ") + e.what();
      rep.attempts.push_back(att);
    } catch (const Error& e) {
      att.note = e.what();
      rep.attempts.push_back(att);
    }
  }

  if (best && best->report.pass) {
    best->report.attempts = rep.attempts;
    return *best;
  }
  // no k met the target: return the best attempt marked failed
  if (best) {
    best->report.attempts = rep.attempts;
    best->report.pass = false;
    best->report.failure_stage = "budget_exhausted";
    return *best;
  }
  PipelineReport fail = rep;
  fail.pass = false;
  fail.failure_stage = "no_usable_characteristic_time";
  return {identity_map(), fail};
}

}  // namespace circdiff
