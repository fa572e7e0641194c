#pragma once

#include "circdiff/arc.hpp"
#include "circdiff/error.hpp"
#include "circdiff/real.hpp"

#include <memory>
#include <string>
#include <vector>

namespace circdiff {

enum class Side { Left, Right, Both };

enum class Smoothness { C0, PiecewiseC1, C1, C2 };

const char* smoothness_name(Smoothness s);
Smoothness min_smoothness(Smoothness a, Smoothness b);

// Immutable representation node of an orientation-preserving circle
// diffeomorphism, exposed through its lift F (F(x+1) = F(x) + 1, F' > 0).
// Nodes are shared and never mutated after construction, so maps are safe to
// copy and read concurrently.
class MapNode {
 public:
  virtual ~MapNode() = default;
  virtual Real lift(const Real& x) const = 0;
  virtual Real lift_deriv(const Real& x, Side side) const = 0;
  virtual Real invert_lift(const Real& y) const = 0;
  virtual Smoothness smoothness() const = 0;
  // Circle points where left/right derivatives may disagree.
  virtual std::vector<Real> breakpoints() const { return {}; }
  virtual const char* kind() const = 0;
};

class CircleDiffeo {
 public:
  CircleDiffeo();  // identity
  explicit CircleDiffeo(std::shared_ptr<const MapNode> node);

  Real eval(const Real& x) const { return mod1(node_->lift(x)); }
  Real lift(const Real& x) const { return node_->lift(x); }
  // One-sided derivative; Side::Both requires both sides to agree to 1e-9
  // relative and throws TwoSidedAtBreakpoint otherwise.
  Real deriv(const Real& x, Side side = Side::Both) const;
  Real invert(const Real& y) const { return mod1(node_->invert_lift(y)); }
  Real lift_invert(const Real& y) const { return node_->invert_lift(y); }
  Smoothness smoothness() const { return node_->smoothness(); }
  std::vector<Real> breakpoints() const { return node_->breakpoints(); }
  const MapNode& node() const { return *node_; }
  const std::shared_ptr<const MapNode>& node_ptr() const { return node_; }

 private:
  std::shared_ptr<const MapNode> node_;
};

// ---- concrete nodes ---------------------------------------------------

class RotationNode final : public MapNode {
 public:
  explicit RotationNode(Real angle) : angle_(mod1(angle)) {}
  Real lift(const Real& x) const override { return x + angle_; }
  Real lift_deriv(const Real&, Side) const override { return Real(1); }
  Real invert_lift(const Real& y) const override { return y - angle_; }
  Smoothness smoothness() const override { return Smoothness::C2; }
  const char* kind() const override { return "rotation"; }
  const Real& angle() const { return angle_; }

 private:
  Real angle_;
};

// Closed-form family: lift x -> x + c + (a / 2pi) sin(2pi (x + phase)).
// A diffeomorphism iff |a| < 1.
class SineNode final : public MapNode {
 public:
  SineNode(Real c, Real a, Real phase);
  Real lift(const Real& x) const override;
  Real lift_deriv(const Real& x, Side) const override;
  Real invert_lift(const Real& y) const override;
  Smoothness smoothness() const override { return Smoothness::C2; }
  const char* kind() const override { return "sine"; }
  const Real& offset() const { return c_; }
  const Real& amplitude() const { return a_; }
  const Real& phase() const { return phase_; }

 private:
  Real c_, a_, phase_, two_pi_;
};

// Piecewise-quadratic circle homeomorphism: between consecutive nodes the
// derivative is linear from dr of the left node to dl of the right node (so a
// piece with dr == dl is affine, a piece with dr != dl is a quadratic blend
// ramp). Covers plain piecewise-affine maps, blended maps and every smoothing
// this project constructs.
class PwQuadNode final : public MapNode {
 public:
  struct Node {
    Real x;   // circle point in [0,1)
    Real F;   // lift value at x
    Real dl;  // derivative from the left
    Real dr;  // derivative from the right
  };

  // Nodes must be sorted by x (all in [0,1)) and satisfy the trapezoid
  // consistency F_{i+1} - F_i = (x_{i+1} - x_i)(dr_i + dl_{i+1})/2 on every
  // piece including the wrap piece.
  explicit PwQuadNode(std::vector<Node> nodes);

  // Piecewise-affine homeomorphism from breakpoints and their images.
  static std::shared_ptr<const PwQuadNode> affine(std::vector<Real> breakpoints,
                                                  std::vector<Real> images);

  Real lift(const Real& x) const override;
  Real lift_deriv(const Real& x, Side side) const override;
  Real invert_lift(const Real& y) const override;
  Smoothness smoothness() const override { return tag_; }
  std::vector<Real> breakpoints() const override;
  const char* kind() const override { return "pw_quad"; }
  const std::vector<Node>& pts() const { return pts_; }

 private:
  std::vector<Node> pts_;
  Smoothness tag_;
  // piece i joins pts_[i] to pts_[i+1] (wrapping to pts_[0] + (1,1,..))
  size_t piece_for_point(const Real& u) const;   // u in [x0, x0+1)
  size_t piece_for_value(const Real& v) const;   // v in [F0, F0+1)
  void piece_data(size_t i, Real& xa, Real& Fa, Real& da, Real& xb, Real& Fb,
                  Real& db) const;
};

class ComposedNode final : public MapNode {
 public:
  struct Factor {
    CircleDiffeo map;
    bool inverse = false;
  };

  // Factors in composition order: factors[0] is applied last, i.e.
  // {h, f, h^-1} represents h . f . h^-1. Nested composed factors are
  // spliced (the composition stays an explicit list, nothing is simplified).
  explicit ComposedNode(std::vector<Factor> factors);

  Real lift(const Real& x) const override;
  Real lift_deriv(const Real& x, Side side) const override;
  Real invert_lift(const Real& y) const override;
  Smoothness smoothness() const override;
  std::vector<Real> breakpoints() const override;
  const char* kind() const override { return "composed"; }
  const std::vector<Factor>& factors() const { return factors_; }

 private:
  std::vector<Factor> factors_;
};

// ---- factories ---------------------------------------------------------

CircleDiffeo rotation_map(const Real& angle);
CircleDiffeo identity_map();
CircleDiffeo sine_map(const Real& c, const Real& a, const Real& phase = Real(0));
CircleDiffeo pw_affine_map(std::vector<Real> breakpoints, std::vector<Real> images);
CircleDiffeo compose(std::vector<ComposedNode::Factor> factors);
CircleDiffeo compose(const CircleDiffeo& outer, const CircleDiffeo& inner);
CircleDiffeo inverse(const CircleDiffeo& f);
// h f h^-1
CircleDiffeo conjugate(const CircleDiffeo& h, const CircleDiffeo& f);

// ---- orbit helpers ------------------------------------------------------

// f^i(x) for i of either sign. Detects conjugated-iteration structure
// (A . B . A^-1) and iterates the core instead of chaining i evaluations.
Real orbit_point(const CircleDiffeo& f, long i, const Real& x);
// d(f^i)(x) via the chain rule along the orbit (two-sided derivative).
Real orbit_derivative(const CircleDiffeo& f, long i, const Real& x);

// Shared helper for closed-form nodes: monotone lift inversion by bisection
// within [lo, hi] plus Newton polish. Throws NoConvergence if the bracket is
// corrupt.
Real invert_monotone_lift(const MapNode& node, const Real& y, Real lo, Real hi);

}  // namespace circdiff
