#pragma once

#include "circdiff/conjugacy_builder.hpp"
#include "circdiff/denjoy.hpp"
#include "circdiff/ratio_perturbation.hpp"
#include "circdiff/rotation_combinatorics.hpp"

#include <cstdint>
#include <optional>

namespace circdiff {

struct PipelineConfig {
  Real eps;                  // target C1 closeness
  Real alpha;                // common rotation number (exact input)
  long k_max = 200;
  Real x = Real(0);          // base point for f's segment
  Real y = Real(0);          // base point for g's segment
  unsigned precision = kDefaultPrecisionBits;
  std::uint64_t seed = 1;
  Real perturb_budget;       // <= 0: defaults to eps/4
  Real denjoy_budget;        // <= 0: defaults to eps/(48 M)
  Real distortion_budget;    // <= 0: defaults to eps/(24 M); diagnostic only
  Real wandering_tau = Real("1e-5");
  long rotnum_check_n = 1024;
  int final_grid = 2048;
};

struct AttemptInfo {
  long k = 0, w = 0;
  bool adapted = false;
  Real component_distortion;  // measured max over both maps' components
  bool distortion_budget_met = false;
  bool perturb_feasible = false;
  bool l_affine_pass = false;
  bool smoothing_pass = false;
  Real final_sup, final_deriv;
  bool success = false;
  std::string note;
};

struct PipelineReport {
  bool pass = false;
  std::string failure_stage;  // first failing stage when pass is false
  long k = -1, w = -1;
  Real eps;
  Real max_dg;                 // M
  bool denjoy_applied = false;
  Real denjoy_eps;
  Real target_R0, target_Rn;
  PerturbationPlan perturbation;
  CertReport l_affine;
  SmoothingReport smoothing;
  Real final_sup, final_deriv;
  std::vector<AttemptInfo> attempts;
  std::uint64_t seed = 0;
};

struct ConjugacyOutcome {
  CircleDiffeo h;  // h f h^-1 is the certified conjugate
  PipelineReport report;
};

// End-to-end driver: reduces wandering distortion when f has wandering
// intervals, searches the characteristic schedule for the smallest usable k,
// perturbs g to f's segment ratios, builds and smooths the piecewise-affine
// conjugacy, and certifies the final C1 distance directly.
ConjugacyOutcome conjugate_towards(const CircleDiffeo& f, const CircleDiffeo& g,
                                   const PipelineConfig& cfg);

}  // namespace circdiff
