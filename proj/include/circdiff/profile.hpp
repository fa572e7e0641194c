#pragma once

#include "circdiff/real.hpp"

#include <vector>

namespace circdiff {

// Monotone C1 map on an interval, defined by a continuous piecewise-linear
// derivative profile plus an anchor value. Pieces integrate to quadratics, so
// evaluation, differentiation and inversion are all closed-form. This is the
// single primitive behind quadratic blends, identity collars and derivative
// profiles on gaps.
class DerivProfile {
 public:
  // nodes strictly increasing, dvals strictly positive, same length >= 2.
  DerivProfile(std::vector<Real> nodes, std::vector<Real> dvals, Real value_at_left);

  Real eval(const Real& x) const;
  Real deriv(const Real& x) const;
  // Unique x with eval(x) == y; y must lie in [eval(x0), eval(x1)].
  Real invert(const Real& y) const;

  const std::vector<Real>& nodes() const { return nodes_; }
  const std::vector<Real>& dvals() const { return dvals_; }
  Real left() const { return nodes_.front(); }
  Real right() const { return nodes_.back(); }
  Real value_left() const { return vals_.front(); }
  Real value_right() const { return vals_.back(); }
  Real min_deriv() const;
  Real max_deriv() const;

 private:
  std::vector<Real> nodes_;
  std::vector<Real> dvals_;
  std::vector<Real> vals_;  // integrated values at nodes
  size_t piece_for(const Real& x) const;
};

// C1 monotone interpolant between prescribed endpoint values and derivatives:
// derivative profile {d0, dm, d1} with the middle value solved so the
// integral matches F1 - F0. Throws Errc::InfeasibleProfile when no positive
// middle derivative exists.
DerivProfile monotone_c1_bridge(const Real& x0, const Real& x1, const Real& F0,
                                const Real& F1, const Real& d0, const Real& d1);

// Like monotone_c1_bridge but with a flat plateau over the middle portion:
// profile {d0, c, c, d1} with ramp fraction `mu` in (0, 1/2) on each end and
// the plateau height c solved from the integral. Gentler extreme derivatives
// than the three-node bridge.
DerivProfile plateau_bridge(const Real& x0, const Real& x1, const Real& F0,
                            const Real& F1, const Real& d0, const Real& d1,
                            const Real& mu);

// Exact integral of the piecewise-linear interpolant through
// (nodes[i], dvals[i]).
Real profile_integral(const std::vector<Real>& nodes, const std::vector<Real>& dvals);

}  // namespace circdiff
