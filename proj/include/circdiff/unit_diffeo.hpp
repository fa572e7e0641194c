#pragma once

#include "circdiff/arc.hpp"
#include "circdiff/circle_map.hpp"
#include "circdiff/profile.hpp"

#include <memory>
#include <vector>

namespace circdiff {

// Orientation-preserving diffeomorphism of [0,1] fixing both endpoints.
class UnitNode {
 public:
  virtual ~UnitNode() = default;
  virtual Real eval(const Real& x) const = 0;
  virtual Real deriv(const Real& x, Side side) const = 0;
  virtual Real invert(const Real& y) const = 0;
  virtual const char* kind() const = 0;
};

class UnitDiffeo {
 public:
  UnitDiffeo();  // identity
  explicit UnitDiffeo(std::shared_ptr<const UnitNode> node);
  Real eval(const Real& x) const { return node_->eval(x); }
  Real deriv(const Real& x, Side side = Side::Right) const {
    return node_->deriv(x, side);
  }
  Real invert(const Real& y) const { return node_->invert(y); }
  const UnitNode& node() const { return *node_; }
  const std::shared_ptr<const UnitNode>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<const UnitNode> node_;
};

UnitDiffeo unit_identity();

// Monotone C1 map from a positive derivative profile on [0,1]; the profile
// must integrate to 1 (checked).
UnitDiffeo unit_from_profile(DerivProfile profile);

// factors[0] applied last (same convention as circle compositions)
struct UnitFactor {
  UnitDiffeo map;
  bool inverse = false;
};
UnitDiffeo unit_compose(std::vector<UnitFactor> factors);
UnitDiffeo unit_inverse(const UnitDiffeo& f);

// Pieces glue continuously: piece i maps [cuts[i], cuts[i+1]] onto
// [cuts'[i], cuts'[i+1]] through its own unit map (affinely rescaled).
struct UnitPiece {
  Real src_lo, src_hi;  // consecutive, covering [0,1]
  Real dst_lo, dst_hi;
  UnitDiffeo map;
};
UnitDiffeo unit_piecewise(std::vector<UnitPiece> pieces);

// Convex path factor between identity and F: x -> (1-s) x + s F(x).
UnitDiffeo unit_convex_with(const UnitDiffeo& F, const Real& s);

// Restriction of f to [a, b], affinely renormalized to a unit diffeo:
// t -> (f(a + t (b-a)) - f(a)) / (f(b) - f(a)).
UnitDiffeo unit_restrict(const UnitDiffeo& f, const Real& a, const Real& b);

// Affine-chart restriction of a circle map: chart_dst . g|_src . chart_src^-1
// where the charts are the orientation-preserving affine maps src -> [0,1],
// dst -> [0,1]. Requires g(src) = dst to tolerance (ImageMismatch).
UnitDiffeo rescale_to_unit(const CircleDiffeo& g, const CircleArc& src,
                           const CircleArc& dst);

struct UnitC1Distance {
  Real sup;
  Real deriv;
  Real max() const { return sup > deriv ? sup : deriv; }
};

UnitC1Distance unit_c1_distance(const UnitDiffeo& f, const UnitDiffeo& g,
                                int grid = 256);
UnitC1Distance unit_c1_from_identity(const UnitDiffeo& f, int grid = 256);
UnitC1Distance unit_c1_from_identity_at(const UnitDiffeo& f,
                                        const std::vector<Real>& points);

// max over sampled pairs of log(df(x)/df(y)) on [lo, hi]
Real unit_distortion(const UnitDiffeo& f, const Real& lo, const Real& hi,
                     int samples = 128);
Real unit_distortion_at(const UnitDiffeo& f, const std::vector<Real>& points);

// Probe set refined where the derivative varies: starts from a uniform grid
// on [0,1] and bisects intervals whose endpoint log-derivatives differ by
// more than max_jump, capturing boundary layers a uniform grid would miss.
std::vector<Real> adaptive_probe_points(const UnitDiffeo& f, int base_grid,
                                        double max_jump, size_t cap = 2048);

}  // namespace circdiff
