#pragma once

#include "circdiff/real.hpp"

#include <map>
#include <vector>

namespace circdiff {

// An irrational angle in (0,1) at a recorded working precision, optionally
// carrying continued-fraction terms it was built from.
struct AlphaRep {
  Real value;
  std::vector<long> continued_fraction;  // empty when not derived from a CF
  unsigned precision_bits = 0;

  static AlphaRep from_value(Real v);
  static AlphaRep from_cf(const std::vector<long>& terms);
  static AlphaRep golden();       // (sqrt(5) - 1) / 2
  static AlphaRep sqrt2_minus_1();
  static AlphaRep e_minus_2();
};

// Neighbors of 0 in the orbit segment {0, alpha, ..., n alpha}: the left
// neighbor sits at distance `a` (and equals r*alpha mod 1), the right neighbor
// at distance `b` (equals s*alpha mod 1). At n = 1 both neighbors are the
// single point alpha and a, b are the literal circular distances.
struct NeighborState {
  long n = 1;
  Real a, b;
  long r = 1, s = 1;
};

NeighborState initial_state(const AlphaRep& alpha);

// One step of the neighbor recurrence. Throws TieBreak when |a - b| is below
// the precision floor.
NeighborState advance(const NeighborState& st, const AlphaRep& alpha);

// Ground truth by sorting the orbit segment directly.
NeighborState brute_force_neighbors(const AlphaRep& alpha, long n);

// Incremental ground truth: maintains the sorted orbit segment and reads the
// neighbors of 0 geometrically after each insertion. Independent of the
// recurrence; O(log n) per step.
class NeighborOracle {
 public:
  explicit NeighborOracle(const AlphaRep& alpha);
  // extends the segment from length n to n+1 and returns the state at n+1
  NeighborState grow();
  const NeighborState& state() const { return state_; }
  // lengths of all gaps of the current segment (for the three-gap check)
  std::vector<Real> gap_lengths() const;

 private:
  AlphaRep alpha_;
  std::map<Real, long> pts_;
  Real next_point_;
  long n_ = 1;
  NeighborState state_;
  void read_state();
};

// All n <= n_max with r_n + s_n = n + 1, i.e. (n+1)alpha re-enters the gap
// (-a_n, b_n) around 0. Both characterizations are computed and must agree.
std::vector<long> closest_return_times(const AlphaRep& alpha, long n_max);

// Subsequence of the closest returns with a/b in [1/2, 2].
std::vector<long> balanced_returns(const AlphaRep& alpha, long n_max);

// inf{ floor((n-r-1)/2), floor((n-s-1)/2) }, floored at zero.
long wandering_time(long n, long r, long s);

struct ScheduleEntry {
  long k = 0;        // characteristic time, k = N - 1
  long N = 0;        // balanced closest-return precursor it came from
  long r = 0, s = 0; // neighbor indices at n = k
  Real a, b;         // neighbor distances at n = k
  long w = 0;        // wandering time at k
  bool adapted = false;
};

struct CharacteristicSchedule {
  AlphaRep alpha;
  std::vector<ScheduleEntry> entries;
};

// Characteristic times: balanced returns N passing the dichotomy
// (a < b => r <= 2s, a > b => s <= 2r), emitted as k = N - 1 with the
// neighbor state recomputed at k. The adapted flag is the rotation-segment
// adaptedness at length k (r != k, s != k, r + s != k + 1; length >= 2).
CharacteristicSchedule characteristic_times(const AlphaRep& alpha, long n_max);

}  // namespace circdiff
