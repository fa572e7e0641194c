#include "circdiff/profile.hpp"

#include "circdiff/error.hpp"

#include <algorithm>

namespace circdiff {

DerivProfile::DerivProfile(std::vector<Real> nodes, std::vector<Real> dvals,
                           Real value_at_left)
    : nodes_(std::move(nodes)), dvals_(std::move(dvals)) {
  if (nodes_.size() < 2 || nodes_.size() != dvals_.size())
    throw Error(Errc::InvalidInput, "profile needs matching nodes/derivatives");
  for (size_t i = 0; i + 1 < nodes_.size(); ++i)
    if (!(nodes_[i] < nodes_[i + 1]))
      throw Error(Errc::InvalidInput, "profile nodes must increase");
  for (const Real& d : dvals_)
    if (!(d > 0))
      throw Error(Errc::InvalidInput, "profile derivative must be positive");
  vals_.resize(nodes_.size());
  vals_[0] = value_at_left;
  for (size_t i = 0; i + 1 < nodes_.size(); ++i) {
    // trapezoid: the linear derivative piece integrates exactly
    vals_[i + 1] = vals_[i] + (nodes_[i + 1] - nodes_[i]) * (dvals_[i] + dvals_[i + 1]) / 2;
  }
}

size_t DerivProfile::piece_for(const Real& x) const {
  // rightmost piece with nodes_[i] <= x (clamped)
  size_t lo = 0, hi = nodes_.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (nodes_[mid] <= x) lo = mid; else hi = mid;
  }
  return lo;
}

Real DerivProfile::eval(const Real& x) const {
  size_t i = piece_for(x);
  Real h = x - nodes_[i];
  Real dx = nodes_[i + 1] - nodes_[i];
  Real slope = (dvals_[i + 1] - dvals_[i]) / dx;
  return vals_[i] + dvals_[i] * h + slope * h * h / 2;
}

Real DerivProfile::deriv(const Real& x) const {
  size_t i = piece_for(x);
  Real dx = nodes_[i + 1] - nodes_[i];
  Real slope = (dvals_[i + 1] - dvals_[i]) / dx;
  return dvals_[i] + slope * (x - nodes_[i]);
}

Real DerivProfile::invert(const Real& y) const {
  // locate piece by value
  size_t lo = 0, hi = nodes_.size() - 1;
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (vals_[mid] <= y) lo = mid; else hi = mid;
  }
  size_t i = lo;
  Real dx = nodes_[i + 1] - nodes_[i];
  Real kappa = (dvals_[i + 1] - dvals_[i]) / dx;  // derivative slope
  Real c = y - vals_[i];
  Real d0 = dvals_[i];
  if (kappa == 0) return nodes_[i] + c / d0;
  // solve kappa/2 h^2 + d0 h = c; positive-derivative root, stable form
  Real disc = d0 * d0 + 2 * kappa * c;
  if (disc < 0) disc = 0;
  Real h = 2 * c / (d0 + sqrt(disc));
  return nodes_[i] + h;
}

Real DerivProfile::min_deriv() const {
  Real m = dvals_[0];
  for (const Real& d : dvals_) m = (std::min)(m, d);
  return m;
}

Real DerivProfile::max_deriv() const {
  Real m = dvals_[0];
  for (const Real& d : dvals_) m = (std::max)(m, d);
  return m;
}

Real profile_integral(const std::vector<Real>& nodes, const std::vector<Real>& dvals) {
  Real acc = 0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    acc += (nodes[i + 1] - nodes[i]) * (dvals[i] + dvals[i + 1]) / 2;
  return acc;
}

DerivProfile monotone_c1_bridge(const Real& x0, const Real& x1, const Real& F0,
                                const Real& F1, const Real& d0, const Real& d1) {
  if (!(x1 > x0) || !(F1 > F0))
    throw Error(Errc::InvalidInput, "bridge endpoints must increase");
  Real h = x1 - x0;
  Real xm = x0 + h / 2;
  // integral = h/4 * (d0 + 2 dm + d1) == F1 - F0
  Real dm = (4 * (F1 - F0) / h - d0 - d1) / 2;
  if (!(dm > 0))
    throw Error(Errc::InfeasibleProfile,
                "no positive middle derivative matches the value gap");
  return DerivProfile({x0, xm, x1}, {d0, dm, d1}, F0);
}

DerivProfile plateau_bridge(const Real& x0, const Real& x1, const Real& F0,
                            const Real& F1, const Real& d0, const Real& d1,
                            const Real& mu) {
  if (!(mu > 0) || !(mu < Real(1) / 2))
    throw Error(Errc::InvalidInput, "ramp fraction must be in (0, 1/2)");
  Real h = x1 - x0;
  Real ra = x0 + mu * h;
  Real rb = x1 - mu * h;
  // integral = h [ mu (d0 + d1)/2 + c (1 - mu) ] == F1 - F0
  Real c = ((F1 - F0) / h - mu * (d0 + d1) / 2) / (1 - mu);
  if (!(c > 0))
    throw Error(Errc::InfeasibleProfile, "plateau height not positive");
  return DerivProfile({x0, ra, rb, x1}, {d0, c, c, d1}, F0);
}

}  // namespace circdiff
