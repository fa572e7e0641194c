#include "circdiff/unit_diffeo.hpp"

#include <algorithm>

namespace circdiff {

namespace {

class IdentityUnitNode final : public UnitNode {
 public:
  Real eval(const Real& x) const override { return x; }
  Real deriv(const Real&, Side) const override { return Real(1); }
  Real invert(const Real& y) const override { return y; }
  const char* kind() const override { return "identity"; }
};

class ProfileUnitNode final : public UnitNode {
 public:
  explicit ProfileUnitNode(DerivProfile p) : profile_(std::move(p)) {
    if (!(profile_.left() == 0) || !(profile_.right() == 1))
      throw Error(Errc::InvalidInput, "unit profile must span [0,1]");
    if (abs(profile_.value_left()) > Real("1e-30") ||
        abs(profile_.value_right() - 1) > Real("1e-25"))
      throw Error(Errc::InvalidInput, "unit profile must fix 0 and 1");
  }
  Real eval(const Real& x) const override { return profile_.eval(x); }
  Real deriv(const Real& x, Side) const override { return profile_.deriv(x); }
  Real invert(const Real& y) const override { return profile_.invert(y); }
  const char* kind() const override { return "profile"; }
  const DerivProfile& profile() const { return profile_; }

 private:
  DerivProfile profile_;
};

class ComposedUnitNode final : public UnitNode {
 public:
  explicit ComposedUnitNode(std::vector<UnitFactor> fs) : factors_(std::move(fs)) {
    if (factors_.empty())
      throw Error(Errc::InvalidInput, "empty unit composition");
  }
  Real eval(const Real& x) const override {
    Real v = x;
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it)
      v = it->inverse ? it->map.invert(v) : it->map.eval(v);
    return v;
  }
  Real deriv(const Real& x, Side side) const override {
    Real v = x, d(1);
    for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
      if (it->inverse) {
        Real u = it->map.invert(v);
        d /= it->map.deriv(u, side);
        v = u;
      } else {
        d *= it->map.deriv(v, side);
        v = it->map.eval(v);
      }
    }
    return d;
  }
  Real invert(const Real& y) const override {
    Real v = y;
    for (const auto& f : factors_)
      v = f.inverse ? f.map.eval(v) : f.map.invert(v);
    return v;
  }
  const char* kind() const override { return "composed"; }

 private:
  std::vector<UnitFactor> factors_;
};

class PiecewiseUnitNode final : public UnitNode {
 public:
  explicit PiecewiseUnitNode(std::vector<UnitPiece> ps) : pieces_(std::move(ps)) {
    if (pieces_.empty())
      throw Error(Errc::InvalidInput, "empty piecewise unit map");
    if (!(pieces_.front().src_lo == 0) || !(pieces_.back().src_hi == 1) ||
        !(pieces_.front().dst_lo == 0) || !(pieces_.back().dst_hi == 1))
      throw Error(Errc::InvalidInput, "pieces must cover [0,1] onto [0,1]");
    for (size_t i = 0; i + 1 < pieces_.size(); ++i) {
      if (pieces_[i].src_hi != pieces_[i + 1].src_lo ||
          pieces_[i].dst_hi != pieces_[i + 1].dst_lo)
        throw Error(Errc::InvalidInput, "pieces must glue continuously");
    }
    for (const auto& p : pieces_)
      if (!(p.src_hi > p.src_lo) || !(p.dst_hi > p.dst_lo))
        throw Error(Errc::InvalidInput, "pieces must be increasing");
  }
  Real eval(const Real& x) const override {
    const UnitPiece& p = piece_for(x);
    Real t = (x - p.src_lo) / (p.src_hi - p.src_lo);
    return p.dst_lo + (p.dst_hi - p.dst_lo) * p.map.eval(t);
  }
  Real deriv(const Real& x, Side side) const override {
    const UnitPiece& p = piece_for(x, side);
    Real t = (x - p.src_lo) / (p.src_hi - p.src_lo);
    if (t < 0) t = 0;
    if (t > 1) t = 1;
    return p.map.deriv(t, side) * (p.dst_hi - p.dst_lo) / (p.src_hi - p.src_lo);
  }
  Real invert(const Real& y) const override {
    size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (pieces_[mid].dst_lo <= y) lo = mid; else hi = mid - 1;
    }
    const UnitPiece& p = pieces_[lo];
    Real t = p.map.invert((y - p.dst_lo) / (p.dst_hi - p.dst_lo));
    return p.src_lo + (p.src_hi - p.src_lo) * t;
  }
  const char* kind() const override { return "piecewise"; }

 private:
  std::vector<UnitPiece> pieces_;
  const UnitPiece& piece_for(const Real& x, Side side = Side::Right) const {
    size_t lo = 0, hi = pieces_.size() - 1;
    while (lo < hi) {
      size_t mid = (lo + hi + 1) / 2;
      if (pieces_[mid].src_lo < x ||
          (pieces_[mid].src_lo == x && side == Side::Right))
        lo = mid;
      else
        hi = mid - 1;
    }
    return pieces_[lo];
  }
};

class ConvexPathUnitNode final : public UnitNode {
 public:
  ConvexPathUnitNode(UnitDiffeo F, Real s) : F_(std::move(F)), s_(std::move(s)) {
    if (!(s_ >= 0) || !(s_ <= 1))
      throw Error(Errc::InvalidInput, "path parameter must be in [0,1]");
  }
  Real eval(const Real& x) const override {
    return (1 - s_) * x + s_ * F_.eval(x);
  }
  Real deriv(const Real& x, Side side) const override {
    return (1 - s_) + s_ * F_.deriv(x, side);
  }
  Real invert(const Real& y) const override {
    // monotone on [0,1]; bisection with Newton polish
    Real lo(0), hi(1);
    const Real tol = inversion_tolerance();
    Real x = y;
    for (int iter = 0; iter < 200; ++iter) {
      Real fx = eval(x);
      if (abs(fx - y) <= tol) return x;
      if (fx < y) lo = x; else hi = x;
      Real xn = x - (fx - y) / deriv(x, Side::Right);
      x = (xn > lo && xn < hi) ? xn : (lo + hi) / 2;
    }
    return x;
  }
  const char* kind() const override { return "convex_path"; }

 private:
  UnitDiffeo F_;
  Real s_;
};

class RestrictUnitNode final : public UnitNode {
 public:
  RestrictUnitNode(UnitDiffeo f, Real a, Real b)
      : f_(std::move(f)), a_(std::move(a)), b_(std::move(b)) {
    if (!(a_ >= 0) || !(b_ <= 1) || !(a_ < b_))
      throw Error(Errc::InvalidInput, "restriction needs 0 <= a < b <= 1");
    fa_ = f_.eval(a_);
    span_ = f_.eval(b_) - fa_;
  }
  Real eval(const Real& t) const override {
    return (f_.eval(a_ + t * (b_ - a_)) - fa_) / span_;
  }
  Real deriv(const Real& t, Side side) const override {
    return f_.deriv(a_ + t * (b_ - a_), side) * (b_ - a_) / span_;
  }
  Real invert(const Real& y) const override {
    return (f_.invert(fa_ + y * span_) - a_) / (b_ - a_);
  }
  const char* kind() const override { return "restrict"; }

 private:
  UnitDiffeo f_;
  Real a_, b_, fa_, span_;
};

class CircleRestrictionUnitNode final : public UnitNode {
 public:
  CircleRestrictionUnitNode(CircleDiffeo g, CircleArc src, CircleArc dst)
      : g_(std::move(g)), src_(src), dst_(dst),
        ls_(src.length()), ld_(dst.length()) {}
  Real eval(const Real& t) const override {
    Real p = g_.eval(src_.at(t));
    return clamp01(signed_offset(p, dst_.left, ld_) / ld_);
  }
  Real deriv(const Real& t, Side side) const override {
    return g_.node().lift_deriv(src_.at(t), side) * ls_ / ld_;
  }
  Real invert(const Real& y) const override {
    Real x = g_.invert(dst_.at(y));
    return clamp01(signed_offset(x, src_.left, ls_) / ls_);
  }
  const char* kind() const override { return "circle_restriction"; }

 private:
  CircleDiffeo g_;
  CircleArc src_, dst_;
  Real ls_, ld_;

  // offset of p from the arc's left end; rounding may park an endpoint just
  // below the left edge, which must read as ~0 rather than ~1
  static Real signed_offset(const Real& p, const Real& left, const Real& len) {
    Real off = mod1(p - left);
    if (off > (1 + len) / 2) off -= 1;
    return off;
  }
  static Real clamp01(Real v) {
    if (v < 0) v = 0;
    if (v > 1) v = 1;
    return v;
  }
};

}  // namespace

UnitDiffeo::UnitDiffeo() : node_(std::make_shared<IdentityUnitNode>()) {
  ensure_precision_initialized();
}

UnitDiffeo::UnitDiffeo(std::shared_ptr<const UnitNode> node)
    : node_(std::move(node)) {
  if (!node_) throw Error(Errc::InvalidInput, "null unit node");
}

UnitDiffeo unit_identity() { return UnitDiffeo(); }

UnitDiffeo unit_from_profile(DerivProfile profile) {
  return UnitDiffeo(std::make_shared<ProfileUnitNode>(std::move(profile)));
}

UnitDiffeo unit_compose(std::vector<UnitFactor> factors) {
  return UnitDiffeo(std::make_shared<ComposedUnitNode>(std::move(factors)));
}

UnitDiffeo unit_inverse(const UnitDiffeo& f) {
  return unit_compose({{f, true}});
}

UnitDiffeo unit_piecewise(std::vector<UnitPiece> pieces) {
  return UnitDiffeo(std::make_shared<PiecewiseUnitNode>(std::move(pieces)));
}

UnitDiffeo unit_convex_with(const UnitDiffeo& F, const Real& s) {
  return UnitDiffeo(std::make_shared<ConvexPathUnitNode>(F, s));
}

UnitDiffeo unit_restrict(const UnitDiffeo& f, const Real& a, const Real& b) {
  return UnitDiffeo(std::make_shared<RestrictUnitNode>(f, a, b));
}

UnitDiffeo rescale_to_unit(const CircleDiffeo& g, const CircleArc& src,
                           const CircleArc& dst) {
  Real img_l = g.eval(src.left);
  Real img_r = g.eval(src.right);
  Real tol = (std::max)(inversion_tolerance() * 16, Real("1e-25"));
  if (circle_dist(img_l, dst.left) > tol || circle_dist(img_r, dst.right) > tol)
    throw Error(Errc::ImageMismatch, "g(source) does not equal target arc");
  return UnitDiffeo(std::make_shared<CircleRestrictionUnitNode>(g, src, dst));
}

UnitC1Distance unit_c1_distance(const UnitDiffeo& f, const UnitDiffeo& g, int grid) {
  Real sup(0), dd(0);
  for (int i = 0; i <= grid; ++i) {
    Real x = Real(i) / grid;
    sup = (std::max)(sup, abs(f.eval(x) - g.eval(x)));
    for (Side s : {Side::Left, Side::Right}) {
      if ((i == 0 && s == Side::Left) || (i == grid && s == Side::Right)) continue;
      dd = (std::max)(dd, abs(f.deriv(x, s) - g.deriv(x, s)));
    }
  }
  return {sup, dd};
}

UnitC1Distance unit_c1_from_identity(const UnitDiffeo& f, int grid) {
  return unit_c1_distance(f, unit_identity(), grid);
}

UnitC1Distance unit_c1_from_identity_at(const UnitDiffeo& f,
                                        const std::vector<Real>& points) {
  Real sup(0), dd(0);
  for (const Real& x : points) {
    sup = (std::max)(sup, abs(f.eval(x) - x));
    for (Side s : {Side::Left, Side::Right}) {
      if ((x == 0 && s == Side::Left) || (x == 1 && s == Side::Right)) continue;
      dd = (std::max)(dd, abs(f.deriv(x, s) - 1));
    }
  }
  return {sup, dd};
}

Real unit_distortion_at(const UnitDiffeo& f, const std::vector<Real>& points) {
  Real dmin, dmax;
  bool first = true;
  for (const Real& x : points) {
    Side s = (x == 1) ? Side::Left : Side::Right;
    Real d = f.deriv(x, s);
    if (first || d < dmin) dmin = d;
    if (first || d > dmax) dmax = d;
    first = false;
  }
  return log(dmax / dmin);
}

std::vector<Real> adaptive_probe_points(const UnitDiffeo& f, int base_grid,
                                        double max_jump, size_t cap) {
  std::vector<Real> pts;
  pts.reserve(base_grid + 1);
  for (int q = 0; q <= base_grid; ++q) pts.push_back(Real(q) / base_grid);
  auto logd = [&](const Real& x) {
    Side s = (x == 1) ? Side::Left : Side::Right;
    return log(f.deriv(x, s));
  };
  std::vector<Real> vals;
  vals.reserve(pts.size());
  for (const Real& x : pts) vals.push_back(logd(x));
  const Real jump(max_jump);
  const Real min_width = pow(Real(2), -static_cast<int>(precision_bits() / 2));
  bool refined = true;
  while (refined && pts.size() < cap) {
    refined = false;
    std::vector<Real> np, nv;
    np.reserve(2 * pts.size());
    nv.reserve(2 * pts.size());
    for (size_t q = 0; q + 1 < pts.size(); ++q) {
      np.push_back(pts[q]);
      nv.push_back(vals[q]);
      if (abs(vals[q + 1] - vals[q]) > jump &&
          pts[q + 1] - pts[q] > min_width && np.size() < cap) {
        Real mid = (pts[q] + pts[q + 1]) / 2;
        np.push_back(mid);
        nv.push_back(logd(mid));
        refined = true;
      }
    }
    np.push_back(pts.back());
    nv.push_back(vals.back());
    pts = std::move(np);
    vals = std::move(nv);
  }
  return pts;
}

Real unit_distortion(const UnitDiffeo& f, const Real& lo, const Real& hi,
                     int samples) {
  Real dmin, dmax;
  bool first = true;
  for (int i = 0; i <= samples; ++i) {
    Real x = lo + (hi - lo) * Real(i) / samples;
    Side s = (i == samples) ? Side::Left : Side::Right;
    Real d = f.deriv(x, s);
    if (first || d < dmin) dmin = d;
    if (first || d > dmax) dmax = d;
    first = false;
  }
  return log(dmax / dmin);
}

}  // namespace circdiff
