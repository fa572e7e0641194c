#include "circdiff/circle_map.hpp"

#include <algorithm>

namespace circdiff {

const char* smoothness_name(Smoothness s) {
  switch (s) {
    case Smoothness::C0: return "C0";
    case Smoothness::PiecewiseC1: return "piecewise-C1";
    case Smoothness::C1: return "C1";
    case Smoothness::C2: return "C2";
  }
  return "?";
}

Smoothness min_smoothness(Smoothness a, Smoothness b) {
  return static_cast<int>(a) < static_cast<int>(b) ? a : b;
}

CircleDiffeo::CircleDiffeo() : node_(std::make_shared<RotationNode>(Real(0))) {
  ensure_precision_initialized();
}

CircleDiffeo::CircleDiffeo(std::shared_ptr<const MapNode> node)
    : node_(std::move(node)) {
  if (!node_) throw Error(Errc::InvalidInput, "null map node");
}

Real CircleDiffeo::deriv(const Real& x, Side side) const {
  if (side != Side::Both) return node_->lift_deriv(x, side);
  Real dl = node_->lift_deriv(x, Side::Left);
  Real dr = node_->lift_deriv(x, Side::Right);
  Real scale = (std::max)(Real(1), abs(dl));
  if (abs(dl - dr) > scale * Real("1e-9"))
    throw Error(Errc::TwoSidedAtBreakpoint,
                "one-sided derivatives disagree at x=" + to_decimal_string(mod1(x)));
  return dr;
}

// ---- SineNode -----------------------------------------------------------

SineNode::SineNode(Real c, Real a, Real phase)
    : c_(std::move(c)), a_(std::move(a)), phase_(std::move(phase)),
      two_pi_(8 * atan(Real(1))) {
  if (!(abs(a_) < 1))
    throw Error(Errc::InvalidInput, "sine amplitude must satisfy |a| < 1");
}

Real SineNode::lift(const Real& x) const {
  return x + c_ + a_ / two_pi_ * sin(two_pi_ * (x + phase_));
}

Real SineNode::lift_deriv(const Real& x, Side) const {
  return 1 + a_ * cos(two_pi_ * (x + phase_));
}

Real SineNode::invert_lift(const Real& y) const {
  Real slack = abs(a_) / two_pi_ + Real("1e-30");
  return invert_monotone_lift(*this, y, y - c_ - slack, y - c_ + slack);
}

Real invert_monotone_lift(const MapNode& node, const Real& y, Real lo, Real hi) {
  Real flo = node.lift(lo), fhi = node.lift(hi);
  for (int grow = 0; (flo > y || fhi < y) && grow < 8; ++grow) {
    Real span = hi - lo;
    if (flo > y) { lo -= span; flo = node.lift(lo); }
    if (fhi < y) { hi += span; fhi = node.lift(hi); }
  }
  if (flo > y || fhi < y)
    throw Error(Errc::NoConvergence, "bracket does not contain target value");
  const Real tol = inversion_tolerance();
  Real x = (lo + hi) / 2;
  for (int iter = 0; iter < 64; ++iter) {
    Real fx = node.lift(x);
    if (abs(fx - y) <= tol) return x;
    if (fx < y) lo = x; else hi = x;
    // Newton step when it stays inside the bracket, bisection otherwise
    Real d = node.lift_deriv(x, Side::Right);
    Real xn = x - (fx - y) / d;
    x = (xn > lo && xn < hi) ? xn : (lo + hi) / 2;
  }
  // bisect the remainder; monotone so this cannot stall
  for (int iter = 0; iter < 512 && hi - lo > tol / 4; ++iter) {
    x = (lo + hi) / 2;
    if (node.lift(x) < y) lo = x; else hi = x;
  }
  x = (lo + hi) / 2;
  if (abs(node.lift(x) - y) > 4 * tol)
    throw Error(Errc::NoConvergence, "monotone inversion residual too large");
  return x;
}

// ---- PwQuadNode ---------------------------------------------------------

PwQuadNode::PwQuadNode(std::vector<Node> nodes) : pts_(std::move(nodes)) {
  if (pts_.size() < 1)
    throw Error(Errc::InvalidInput, "pw map needs at least one node");
  for (auto& p : pts_) p.x = mod1(p.x);
  if (!std::is_sorted(pts_.begin(), pts_.end(),
                      [](const Node& a, const Node& b) { return a.x < b.x; }))
    throw Error(Errc::InvalidInput, "pw nodes must be sorted");
  for (size_t i = 0; i + 1 < pts_.size(); ++i)
    if (!(pts_[i].x < pts_[i + 1].x))
      throw Error(Errc::InvalidInput, "pw nodes must be strictly increasing");
  bool c1 = true;
  Real worst(0);
  for (size_t i = 0; i < pts_.size(); ++i) {
    const Node& a = pts_[i];
    if (!(a.dl > 0) || !(a.dr > 0))
      throw Error(Errc::InvalidInput, "pw derivative must be positive");
    if (a.dl != a.dr) c1 = false;
    const Node& b = pts_[(i + 1) % pts_.size()];
    Real dx = (i + 1 < pts_.size()) ? b.x - a.x : b.x + 1 - a.x;
    Real dF = (i + 1 < pts_.size()) ? b.F - a.F : b.F + 1 - a.F;
    worst = (std::max)(worst, abs(dF - dx * (a.dr + b.dl) / 2));
    if (!(dF > 0))
      throw Error(Errc::InvalidInput, "pw values must be strictly increasing");
  }
  if (worst > Real("1e-25"))
    throw Error(Errc::InvalidInput,
                "pw node values inconsistent with derivative profile, residual " +
                    to_decimal_string(worst));
  tag_ = c1 ? Smoothness::C1 : Smoothness::PiecewiseC1;
}

std::shared_ptr<const PwQuadNode> PwQuadNode::affine(std::vector<Real> breakpoints,
                                                     std::vector<Real> images) {
  if (breakpoints.size() != images.size() || breakpoints.size() < 2)
    throw Error(Errc::InvalidInput, "need matching breakpoints/images, >= 2");
  const size_t m = breakpoints.size();
  std::vector<size_t> idx(m);
  for (size_t i = 0; i < m; ++i) idx[i] = i;
  for (auto& b : breakpoints) b = mod1(b);
  for (auto& v : images) v = mod1(v);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return breakpoints[a] < breakpoints[b];
  });
  std::vector<Real> bp(m), im(m);
  for (size_t i = 0; i < m; ++i) { bp[i] = breakpoints[idx[i]]; im[i] = images[idx[i]]; }
  // unroll images into a lift: strictly increasing, total turning one
  std::vector<Real> F(m);
  F[0] = im[0];
  for (size_t i = 1; i < m; ++i) {
    Real step = im[i] - im[i - 1];
    if (step <= 0) step += 1;
    if (!(step > 0))
      throw Error(Errc::OrderMismatch, "images not cyclically ordered");
    F[i] = F[i - 1] + step;
  }
  if (!(F[m - 1] - F[0] < 1))
    throw Error(Errc::OrderMismatch, "image points wind more than once");
  std::vector<Node> nodes(m);
  for (size_t i = 0; i < m; ++i) {
    const size_t j = (i + 1) % m;
    Real dx = (j != 0) ? bp[j] - bp[i] : bp[0] + 1 - bp[i];
    Real dF = (j != 0) ? F[j] - F[i] : F[0] + 1 - F[m - 1];
    Real slope = dF / dx;
    nodes[i].x = bp[i];
    nodes[i].F = F[i];
    nodes[i].dr = slope;
    nodes[j].dl = slope;
  }
  return std::make_shared<PwQuadNode>(std::move(nodes));
}

size_t PwQuadNode::piece_for_point(const Real& u) const {
  size_t lo = 0, hi = pts_.size();
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (pts_[mid].x <= u) lo = mid; else hi = mid;
  }
  return lo;
}

size_t PwQuadNode::piece_for_value(const Real& v) const {
  size_t lo = 0, hi = pts_.size();
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (pts_[mid].F <= v) lo = mid; else hi = mid;
  }
  return lo;
}

void PwQuadNode::piece_data(size_t i, Real& xa, Real& Fa, Real& da, Real& xb,
                            Real& Fb, Real& db) const {
  const Node& a = pts_[i];
  xa = a.x; Fa = a.F; da = a.dr;
  if (i + 1 < pts_.size()) {
    const Node& b = pts_[i + 1];
    xb = b.x; Fb = b.F; db = b.dl;
  } else {
    const Node& b = pts_[0];
    xb = b.x + 1; Fb = b.F + 1; db = b.dl;
  }
}

Real PwQuadNode::lift(const Real& x) const {
  Real k = floor(x - pts_[0].x);
  Real u = x - k;
  if (u >= pts_[0].x + 1) { u -= 1; k += 1; }  // guard rounding
  size_t i = piece_for_point(u);
  Real xa, Fa, da, xb, Fb, db;
  piece_data(i, xa, Fa, da, xb, Fb, db);
  Real h = u - xa;
  Real kappa = (db - da) / (xb - xa);
  return Fa + da * h + kappa * h * h / 2 + k;
}

Real PwQuadNode::lift_deriv(const Real& x, Side side) const {
  Real u = pts_[0].x + mod1(x - pts_[0].x);
  // at a node take the requested side
  size_t i = piece_for_point(u);
  if (u == pts_[i].x && side == Side::Left)
    return pts_[i].dl;
  Real xa, Fa, da, xb, Fb, db;
  piece_data(i, xa, Fa, da, xb, Fb, db);
  Real kappa = (db - da) / (xb - xa);
  return da + kappa * (u - xa);
}

Real PwQuadNode::invert_lift(const Real& y) const {
  Real k = floor(y - pts_[0].F);
  Real v = y - k;
  if (v >= pts_[0].F + 1) { v -= 1; k += 1; }
  size_t i = piece_for_value(v);
  Real xa, Fa, da, xb, Fb, db;
  piece_data(i, xa, Fa, da, xb, Fb, db);
  Real kappa = (db - da) / (xb - xa);
  Real c = v - Fa;
  Real h;
  if (kappa == 0) {
    h = c / da;
  } else {
    Real disc = da * da + 2 * kappa * c;
    if (disc < 0) disc = 0;
    h = 2 * c / (da + sqrt(disc));
  }
  return xa + h + k;
}

std::vector<Real> PwQuadNode::breakpoints() const {
  std::vector<Real> out;
  for (const auto& p : pts_)
    if (p.dl != p.dr) out.push_back(p.x);
  return out;
}

// ---- ComposedNode -------------------------------------------------------

ComposedNode::ComposedNode(std::vector<Factor> factors) {
  if (factors.empty())
    throw Error(Errc::InvalidInput, "composition needs at least one factor");
  for (auto& f : factors) {
    if (auto sub = dynamic_cast<const ComposedNode*>(&f.map.node())) {
      // splice nested lists; inverse of a composition reverses its factors
      auto subs = sub->factors();
      if (f.inverse) {
        for (auto it = subs.rbegin(); it != subs.rend(); ++it)
          factors_.push_back({it->map, !it->inverse});
      } else {
        for (auto& s : subs) factors_.push_back(s);
      }
    } else {
      factors_.push_back(f);
    }
  }
}

Real ComposedNode::lift(const Real& x) const {
  Real v = x;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
    v = it->inverse ? it->map.lift_invert(v) : it->map.lift(v);
  return v;
}

Real ComposedNode::lift_deriv(const Real& x, Side side) const {
  Real v = x;
  Real d(1);
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    if (it->inverse) {
      Real u = it->map.lift_invert(v);
      d /= it->map.node().lift_deriv(u, side);
      v = u;
    } else {
      d *= it->map.node().lift_deriv(v, side);
      v = it->map.lift(v);
    }
  }
  return d;
}

Real ComposedNode::invert_lift(const Real& y) const {
  Real v = y;
  for (const auto& f : factors_)
    v = f.inverse ? f.map.lift(v) : f.map.lift_invert(v);
  return v;
}

Smoothness ComposedNode::smoothness() const {
  Smoothness s = Smoothness::C2;
  for (const auto& f : factors_) s = min_smoothness(s, f.map.smoothness());
  return s;
}

std::vector<Real> ComposedNode::breakpoints() const {
  std::vector<Real> out;
  for (size_t j = 0; j < factors_.size(); ++j) {
    for (const Real& b : factors_[j].map.breakpoints()) {
      // pull back through the factors applied before factor j
      Real p = b;
      for (size_t i = j + 1; i < factors_.size(); ++i) {
        const auto& f = factors_[i];
        p = f.inverse ? f.map.eval(p) : f.map.invert(p);
      }
      out.push_back(mod1(p));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- factories ----------------------------------------------------------

CircleDiffeo rotation_map(const Real& angle) {
  return CircleDiffeo(std::make_shared<RotationNode>(angle));
}

CircleDiffeo identity_map() { return rotation_map(Real(0)); }

CircleDiffeo sine_map(const Real& c, const Real& a, const Real& phase) {
  return CircleDiffeo(std::make_shared<SineNode>(c, a, phase));
}

CircleDiffeo pw_affine_map(std::vector<Real> breakpoints, std::vector<Real> images) {
  return CircleDiffeo(PwQuadNode::affine(std::move(breakpoints), std::move(images)));
}

CircleDiffeo compose(std::vector<ComposedNode::Factor> factors) {
  return CircleDiffeo(std::make_shared<ComposedNode>(std::move(factors)));
}

CircleDiffeo compose(const CircleDiffeo& outer, const CircleDiffeo& inner) {
  return compose({{outer, false}, {inner, false}});
}

CircleDiffeo inverse(const CircleDiffeo& f) {
  return compose({{f, true}});
}

CircleDiffeo conjugate(const CircleDiffeo& h, const CircleDiffeo& f) {
  return compose({{h, false}, {f, false}, {h, true}});
}

// ---- orbit helpers ------------------------------------------------------

namespace {

// If f = A . B . A^-1 (three factors with matching outer maps), return the
// pieces so iteration can run through the core.
bool sandwich_parts(const CircleDiffeo& f, ComposedNode::Factor& outer,
                    CircleDiffeo& core) {
  auto c = dynamic_cast<const ComposedNode*>(&f.node());
  if (!c || c->factors().size() != 3) return false;
  const auto& fs = c->factors();
  if (fs[0].map.node_ptr() != fs[2].map.node_ptr()) return false;
  if (fs[0].inverse == fs[2].inverse) return false;
  outer = fs[0];
  core = fs[1].inverse ? inverse(fs[1].map) : fs[1].map;
  return true;
}

Real apply_factor(const ComposedNode::Factor& f, const Real& x, bool invert_it) {
  bool inv = f.inverse != invert_it;
  return inv ? f.map.lift_invert(x) : f.map.lift(x);
}

Real factor_deriv(const ComposedNode::Factor& f, const Real& x_input, bool invert_it) {
  bool inv = f.inverse != invert_it;
  if (inv) {
    Real u = f.map.lift_invert(x_input);
    return 1 / f.map.node().lift_deriv(u, Side::Right);
  }
  return f.map.node().lift_deriv(x_input, Side::Right);
}

}  // namespace

Real orbit_point(const CircleDiffeo& f, long i, const Real& x) {
  if (i == 0) return x;
  if (auto rot = dynamic_cast<const RotationNode*>(&f.node()))
    return x + Real(i) * rot->angle();
  ComposedNode::Factor outer;
  CircleDiffeo core;
  if (sandwich_parts(f, outer, core)) {
    Real u = apply_factor(outer, x, true);
    Real v = orbit_point(core, i, u);
    return apply_factor(outer, v, false);
  }
  Real v = x;
  if (i > 0)
    for (long j = 0; j < i; ++j) v = f.lift(v);
  else
    for (long j = 0; j < -i; ++j) v = f.lift_invert(v);
  return v;
}

Real orbit_derivative(const CircleDiffeo& f, long i, const Real& x) {
  if (i == 0) return Real(1);
  if (dynamic_cast<const RotationNode*>(&f.node())) return Real(1);
  ComposedNode::Factor outer;
  CircleDiffeo core;
  if (sandwich_parts(f, outer, core)) {
    Real u = apply_factor(outer, x, true);
    Real v = orbit_point(core, i, u);
    Real d_core = orbit_derivative(core, i, u);
    // d(A B^i A^-1)(x) = dA(B^i u) * dB^i(u) / dA(u)
    Real dA_v = factor_deriv(outer, v, false);
    Real dA_u = factor_deriv(outer, u, false);
    return dA_v * d_core / dA_u;
  }
  Real v = x;
  Real d(1);
  if (i > 0) {
    for (long j = 0; j < i; ++j) {
      d *= f.node().lift_deriv(v, Side::Right);
      v = f.lift(v);
    }
  } else {
    for (long j = 0; j < -i; ++j) {
      v = f.lift_invert(v);
      d /= f.node().lift_deriv(v, Side::Right);
    }
  }
  return d;
}

}  // namespace circdiff
