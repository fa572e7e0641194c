#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace circdiff {

// Extended-precision real. Precision is set at runtime (per thread) in bits;
// everything downstream -- orbit combinatorics, spline coefficients,
// certificates -- runs on this type.
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

inline constexpr unsigned kDefaultPrecisionBits = 128;

// Sets the working precision (in bits) for Reals constructed afterwards on
// this thread. Returns the previous setting.
unsigned set_precision_bits(unsigned bits);

// Currently configured precision in bits.
unsigned precision_bits();

// Ensures the default precision has been configured at least once.
void ensure_precision_initialized();

// Fractional part normalized to [0, 1).
Real mod1(const Real& x);

// Counterclockwise arc length from `from` to `to`, in (0, 1] for from != to.
// Lengths are always derived through this helper so that arcs straddling 0
// never pick up a spurious wrap.
Real arc_length_ccw(const Real& from, const Real& to);

// min distance on the circle, in [0, 1/2].
Real circle_dist(const Real& x, const Real& y);

// Full-precision decimal round trip.
std::string to_decimal_string(const Real& x);
Real real_from_string(const std::string& s);

// Inversion tolerance implied by the working precision.
Real inversion_tolerance();

// Smallest |a-b| the neighbor recurrence may act on before case selection is
// numerically meaningless: 2^-(precision_bits - 8).
Real tie_break_floor();

// 2^-(precision_bits / 2); below this distinct orbit points are treated as a
// near-collision.
Real collision_tolerance();

// True when x admits a rational approximation p/q with q <= max_den whose
// error is below the working-precision noise floor. Used to reject rational
// rotation-number targets.
bool is_numerically_rational(const Real& x, long max_den = 1000);

}  // namespace circdiff
