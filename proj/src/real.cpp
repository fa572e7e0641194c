#include "circdiff/real.hpp"

#include <cmath>
#include <sstream>

namespace circdiff {

namespace {
thread_local unsigned g_precision_bits = 0;

unsigned bits_to_digits10(unsigned bits) {
  // ceil(bits * log10(2)) plus guard digits so the mantissa holds >= bits.
  return static_cast<unsigned>(std::ceil(bits * 0.3010299956639812)) + 2;
}
}  // namespace

unsigned set_precision_bits(unsigned bits) {
  const unsigned prev = g_precision_bits ? g_precision_bits : kDefaultPrecisionBits;
  g_precision_bits = bits;
  Real::default_precision(bits_to_digits10(bits));
  return prev;
}

unsigned precision_bits() {
  ensure_precision_initialized();
  return g_precision_bits;
}

void ensure_precision_initialized() {
  if (g_precision_bits == 0) set_precision_bits(kDefaultPrecisionBits);
}

Real mod1(const Real& x) {
  Real r = x - floor(x);
  if (r >= 1) r -= 1;  // floor rounding at representation boundaries
  if (r < 0) r += 1;
  return r;
}

Real arc_length_ccw(const Real& from, const Real& to) {
  Real d = mod1(to - from);
  return d;
}

Real circle_dist(const Real& x, const Real& y) {
  Real d = mod1(x - y);
  if (d > Real(1) / 2) d = 1 - d;
  return d;
}

std::string to_decimal_string(const Real& x) {
  std::ostringstream os;
  os << std::setprecision(static_cast<int>(Real::default_precision()) + 3) << x;
  return os.str();
}

Real real_from_string(const std::string& s) {
  ensure_precision_initialized();
  return Real(s);
}

Real inversion_tolerance() {
  const unsigned p = precision_bits();
  return pow(Real(2), -static_cast<int>(p > 24 ? p - 16 : 8));
}

Real tie_break_floor() {
  const unsigned p = precision_bits();
  return pow(Real(2), -static_cast<int>(p > 16 ? p - 8 : 8));
}

Real collision_tolerance() {
  return pow(Real(2), -static_cast<int>(precision_bits() / 2));
}

bool is_numerically_rational(const Real& x, long max_den) {
  // Walk the continued fraction of x; if the remainder vanishes (to the
  // precision noise floor) while the convergent denominator is still small,
  // the value is rational for all practical purposes at this precision.
  const Real noise = pow(Real(2), -static_cast<int>(precision_bits() / 2));
  Real r = abs(x);
  long q_prev = 0, q = 1;
  for (int iter = 0; iter < 64; ++iter) {
    Real f = r - floor(r);
    if (f < noise) return q <= max_den;
    Real inv = 1 / f;
    Real term = floor(inv);
    if (term > Real(std::numeric_limits<long>::max() / 4)) return q <= max_den;
    long a = static_cast<long>(term);
    long q_next = a * q + q_prev;
    q_prev = q;
    q = q_next;
    if (q > max_den) return false;
    r = inv;
  }
  return false;
}

}  // namespace circdiff
