#pragma once

#include "circdiff/adapted_segments.hpp"
#include "circdiff/circle_map.hpp"
#include "circdiff/metrics.hpp"
#include "circdiff/profile.hpp"

#include <optional>

namespace circdiff {

// Circle homeomorphism given by breakpoints and their images, affine in
// between.
class PwAffineHomeo {
 public:
  PwAffineHomeo(std::vector<Real> breakpoints, std::vector<Real> images);
  const std::vector<Real>& breakpoints() const { return breakpoints_; }
  const std::vector<Real>& images() const { return images_; }
  std::vector<Real> slopes() const;
  CircleDiffeo as_diffeo() const { return diffeo_; }
  Real eval(const Real& x) const { return diffeo_.eval(x); }
  Real deriv(const Real& x, Side s) const { return diffeo_.node().lift_deriv(x, s); }
  Real invert(const Real& y) const { return diffeo_.invert(y); }

 private:
  std::vector<Real> breakpoints_, images_;  // sorted by breakpoint
  CircleDiffeo diffeo_;
};

inline constexpr double kDefaultRatioTol = 1e-10;

// H with H(f^k(x)) = g^k(y), affine between consecutive segment points.
// Preconditions: equal lengths, similarly ordered, equal initial and final
// ratios to tol_ratio (relative). Postcondition (checked): H is differentiable
// at x and f^n(x).
PwAffineHomeo build_conjugacy(const AdaptedSegment& seg_f,
                              const AdaptedSegment& seg_g,
                              const Real& tol_ratio = Real(kDefaultRatioTol));

struct CertReport {
  std::string bound_type;
  Real epsilon;          // distortion bound used
  Real worst_ratio;      // worst sampled d(HfH^-1)/dg
  Real worst_point;
  Real additive_bound;   // (exp(2 eps) - 1) * M
  Real max_dg;           // M
  bool pass = false;
  long samples = 0;
};

// Samples one-sided values of d(HfH^-1)/dg and asserts the ratio lies in
// [exp(-2 eps), exp(2 eps)]. When eps <= 0 the bound is the measured maximal
// component distortion of f and g over the complements of their segments;
// otherwise the given eps must dominate the measured distortion
// (PreconditionFailed). Never throws on a bound violation: reports pass=false.
CertReport conjugacy_derivative_certificate(const PwAffineHomeo& H,
                                            const CircleDiffeo& f,
                                            const CircleDiffeo& g,
                                            const OrbitSegment& seg_f,
                                            const OrbitSegment& seg_g,
                                            const Real& eps = Real(0),
                                            int samples_per_component = 64);

void require_cert(const CertReport& report);

// Real-line quadratic blend between slopes alpha (below -1) and beta
// (above 1): C1, derivative within [min,max](alpha, beta).
struct RealBlend {
  Real alpha, beta;
  Real eval(const Real& x) const;
  Real deriv(const Real& x) const;
};

RealBlend blend(const Real& alpha, const Real& beta);

// Verifies min{a/c, b/d} <= dh_{a,b}(x)/dh_{c,d}(x) <= max{a/c, b/d} on a grid
// over [-2, 2], plus the mediant inequality for the same quadruple. Returns
// false on any violation (which would be an implementation bug).
bool blend_ratio_bound_check(const Real& a, const Real& b, const Real& c,
                             const Real& d, int grid = 256);

struct BlendSpec {
  Real alpha, beta;  // left and right slope of the host at the center
  Real center;
  Real radius;
  PwAffineHomeo host;
};

// B^-1 . h_{alpha,beta} . A on [center - radius, center + radius]; agrees
// with the host in value and derivative at the window edges.
struct LocalBlend {
  Real alpha, beta, center, radius, host_at_center;
  Real eval(const Real& z) const;
  Real deriv(const Real& z) const;
};

LocalBlend localized_blend(const BlendSpec& spec);

struct Linearization {
  CircleDiffeo phi;    // fixes every f^i(x) with derivative 1
  CircleDiffeo f_lin;  // phi^-1 f phi; affine on [p_i - t_i, p_i + t_i]
  Real seed_radius;    // T: window i has radius df^i(x) * T >= t
  std::vector<Real> window_radii;
};

// Default seed radius: 0.1 x min gap between the n+2 orbit points, divided by
// the largest cumulative slope.
Real default_linearization_radius(const OrbitSegment& seg);

// Straightens f near the orbit segment. Throws WindowsOverlap when the outer
// windows collide at this t.
Linearization linearize_near_segment(const CircleDiffeo& f,
                                     const OrbitSegment& seg, const Real& t);

struct SmoothingReport {
  Real epsilon;      // measured max one-sided derivative gap of H f_lin H^-1
  Real worst_gap;    // worst |d(h f h^-1) - d(H f H^-1)| sampled
  Real worst_point;
  bool pass = false;
  long samples = 0;
};

// Replaces H by quadratic blends on the propagated windows around the
// interior segment points; the result is a C1 diffeomorphism equal to H
// outside the windows. Certificate: the derivative of h f_lin h^-1 stays
// within 2 epsilon of the one-sided derivatives of H f_lin H^-1.
CircleDiffeo smooth_conjugacy(const PwAffineHomeo& H, const CircleDiffeo& f_lin,
                              const OrbitSegment& seg, const Real& eta,
                              SmoothingReport* report = nullptr);

Real default_smoothing_radius(const OrbitSegment& seg, const Real& seed_radius);

}  // namespace circdiff
