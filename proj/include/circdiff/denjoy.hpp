#pragma once

#include "circdiff/adapted_segments.hpp"
#include "circdiff/circle_map.hpp"
#include "circdiff/metrics.hpp"
#include "circdiff/ratio_perturbation.hpp"
#include "circdiff/rotation_combinatorics.hpp"
#include "circdiff/unit_diffeo.hpp"

#include <functional>

namespace circdiff {

struct DenjoySpec {
  AlphaRep alpha;
  std::string length_family = "inverse_square";  // l_n = c / (|n| + 2)^2
  Real total;     // inserted mass; c is normalized so the truncated sum is total
  long n_trunc = 200;
};

struct DenjoyBuild {
  CircleDiffeo map;
  std::vector<std::pair<long, CircleArc>> intervals;  // inserted A_n, |n| <= n_trunc
  Real inserted_mass;
};

// C1 circle diffeomorphism with wandering intervals A_n at the rotation orbit
// positions, l(f(A_n)) = l_{n+1} exactly for -n_trunc <= n < n_trunc, and
// rotation number exactly alpha (the collapse of the inserted intervals
// semi-conjugates the map to the rotation). Throws MassOverflow when the
// inserted mass reaches 1.
DenjoyBuild build_denjoy(const DenjoySpec& spec);

// Indexed window of unit diffeomorphisms: maps[q] carries index lo + q.
// Entries outside the window are treated as the identity.
struct UnitSeq {
  long lo = 0;
  std::vector<UnitDiffeo> maps;
  long hi() const { return lo + static_cast<long>(maps.size()) - 1; }
  const UnitDiffeo& at(long i) const;
  bool in_window(long i) const { return i >= lo && i <= hi(); }
};

struct FragmentReport {
  long n1 = 0;        // tail threshold actually used
  long n0 = 0;        // g_i = f_i for |i| > n0
  long factor_count = 0;
  Real max_factor_dist;      // max C1 distance of the g_i to the identity
  Real composition_residual; // sup |(g-chain) - (f-chain)| over the test grid
};

// Fragmentation: returns g with g_i = f_i outside [-n0, n0], every g_i
// eps-C1-close to the identity, and the full compositions over [-n0, n0]
// equal (verified pointwise). Tail entries must already be eps/2-close
// (TailNotSmall).
UnitSeq fragment_sequence(const UnitSeq& f, const Real& eps,
                          FragmentReport* report = nullptr);

// Splits one unit diffeomorphism into factors each eps-C1-close to the
// identity whose ordered composition (last factor applied last) evaluates to
// `whole` exactly. factors[j] for j < K-1 are interpolation steps; the final
// factor carries the exact correction. When `partials` is given it receives
// the telescoped prefix products G_j ... G_1 (single profile maps, with the
// last entry `whole` itself).
std::vector<UnitDiffeo> near_identity_factors(const UnitDiffeo& whole,
                                              const Real& eps,
                                              std::vector<UnitDiffeo>* partials = nullptr);

struct LocalConjugator {
  long i;          // orbit index
  CircleArc arc;   // f^i(base)
  UnitDiffeo map;  // h_i in the affine chart of the arc
  bool trivial;    // exactly the identity
};

struct WanderingOrbitConjugacy {
  CircleArc base;
  long cutoff = 0;  // h_i = id for |i| >= cutoff
  std::vector<LocalConjugator> locals;  // indices -horizon .. horizon
  Real worst_distortion;  // max over certified iterates of De(h_{i+1} f h_i^-1)
};

// Conjugators h_i on the iterates of a maximal wandering interval making the
// distortion of h_{i+1} . f . h_i^-1 at most eps on every |i| <= horizon.
// Throws NotWandering when the iterates are not disjoint up to the horizon.
WanderingOrbitConjugacy normalize_wandering_orbit(const CircleDiffeo& f,
                                                  const CircleArc& interval,
                                                  const Real& eps,
                                                  long horizon);

// Derivative profile on a gap [0, L]: endpoint values d_u, d_v, constant on
// the tracked sub-intervals (shared plateau height solved from the integral).
// Throws InfeasibleProfile when no positive plateau matches.
DerivProfile gap_derivative_profile(const Real& length, const Real& d_u,
                                    const Real& d_v,
                                    const std::vector<std::pair<Real, Real>>& tracked,
                                    const Real& target_integral);

// Global C1 diffeomorphism agreeing with every local conjugator on its
// support, with derivative constant on each tracked untouched wandering
// interval and matching endpoint derivatives across the gaps.
CircleDiffeo extend_conjugacy(const CircleDiffeo& f,
                              const std::vector<WanderingOrbitConjugacy>& locals,
                              const std::vector<CircleArc>& tracked);

struct WanderingDetection {
  std::vector<CircleArc> candidates;  // persistent orbit gaps >= tau
};

// Persistent-gap detector: orbit gaps that keep their length as the sample
// orbit grows are wandering-interval candidates.
WanderingDetection detect_wandering(const CircleDiffeo& f, const Real& tau,
                                    long n_probe = 6000);

struct ReductionCertificate {
  CircleArc arc;
  Real distortion_value;
  bool tracked;  // certified <= eps (tracked) vs reported only (untracked)
};

struct ReductionResult {
  CircleDiffeo h;
  CircleDiffeo g;  // h f h^-1
  std::vector<ReductionCertificate> certificates;
  Real eps;
  bool pass = false;
};

// Conjugates f so every tracked wandering interval (length >= tau) carries
// distortion at most eps. Throws NoWanderingDetected for minimal maps.
ReductionResult reduce_wandering_distortion(const CircleDiffeo& f, const Real& eps,
                                            const Real& tau = Real("1e-5"),
                                            long horizon_cap = 1000);

}  // namespace circdiff
