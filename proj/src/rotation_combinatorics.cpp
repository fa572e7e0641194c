#include "circdiff/rotation_combinatorics.hpp"

#include "circdiff/error.hpp"

#include <algorithm>

namespace circdiff {

AlphaRep AlphaRep::from_value(Real v) {
  ensure_precision_initialized();
  AlphaRep a;
  a.value = mod1(v);
  a.precision_bits = circdiff::precision_bits();
  if (!(a.value > 0) || !(a.value < 1))
    throw Error(Errc::InvalidInput, "alpha must lie in (0,1)");
  if (is_numerically_rational(a.value))
    throw Error(Errc::InvalidInput, "alpha is rational at working precision");
  return a;
}

AlphaRep AlphaRep::from_cf(const std::vector<long>& terms) {
  ensure_precision_initialized();
  if (terms.empty()) throw Error(Errc::InvalidInput, "empty continued fraction");
  // tail-first evaluation of [0; t0, t1, ...]
  Real v(0);
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    if (*it < 1) throw Error(Errc::InvalidInput, "partial quotients must be >= 1");
    v = 1 / (Real(*it) + v);
  }
  AlphaRep a;
  a.value = v;
  a.continued_fraction = terms;
  a.precision_bits = circdiff::precision_bits();
  return a;
}

AlphaRep AlphaRep::golden() { return from_value((sqrt(Real(5)) - 1) / 2); }
AlphaRep AlphaRep::sqrt2_minus_1() { return from_value(sqrt(Real(2)) - 1); }
AlphaRep AlphaRep::e_minus_2() { return from_value(exp(Real(1)) - 2); }

NeighborState initial_state(const AlphaRep& alpha) {
  NeighborState st;
  st.n = 1;
  st.a = 1 - alpha.value;
  st.b = alpha.value;
  st.r = st.s = 1;
  return st;
}

NeighborState advance(const NeighborState& st, const AlphaRep& alpha) {
  NeighborState next = st;
  next.n = st.n + 1;
  if (st.r + st.s != st.n + 1) return next;
  if (abs(st.a - st.b) < tie_break_floor())
    throw Error(Errc::TieBreak,
                "neighbor gap difference below precision floor at n=" +
                    std::to_string(st.n) + "; alpha too close to rational");
  if (st.a > st.b) {
    next.a = st.a - st.b;
    next.r = st.n + 1;
  } else {
    next.b = st.b - st.a;
    next.s = st.n + 1;
  }
  return next;
}

NeighborState brute_force_neighbors(const AlphaRep& alpha, long n) {
  if (n < 1) throw Error(Errc::InvalidInput, "need n >= 1");
  if (n > 100000) throw Error(Errc::InvalidInput, "oracle capped at n = 1e5");
  std::vector<std::pair<Real, long>> pts(n + 1);
  Real p(0);
  for (long j = 0; j <= n; ++j) {
    pts[j] = {p, j};
    p = mod1(p + alpha.value);
  }
  std::sort(pts.begin(), pts.end());
  // 0 is the smallest point, so its neighbors are the last and second entries
  NeighborState st;
  st.n = n;
  st.a = 1 - pts.back().first;
  st.r = pts.back().second;
  st.b = pts[1].first;
  st.s = pts[1].second;
  return st;
}

NeighborOracle::NeighborOracle(const AlphaRep& alpha) : alpha_(alpha) {
  pts_[Real(0)] = 0;
  pts_[alpha.value] = 1;
  next_point_ = mod1(alpha.value + alpha.value);
  n_ = 1;
  read_state();
}

void NeighborOracle::read_state() {
  state_.n = n_;
  auto second = std::next(pts_.begin());
  auto last = std::prev(pts_.end());
  state_.b = second->first;
  state_.s = second->second;
  state_.a = 1 - last->first;
  state_.r = last->second;
}

NeighborState NeighborOracle::grow() {
  ++n_;
  pts_[next_point_] = n_;
  next_point_ = mod1(next_point_ + alpha_.value);
  read_state();
  return state_;
}

std::vector<Real> NeighborOracle::gap_lengths() const {
  std::vector<Real> gaps;
  gaps.reserve(pts_.size());
  auto it = pts_.begin();
  Real prev = it->first;
  for (++it; it != pts_.end(); ++it) {
    gaps.push_back(it->first - prev);
    prev = it->first;
  }
  gaps.push_back(1 - prev);  // wrap gap back to 0
  return gaps;
}

std::vector<long> closest_return_times(const AlphaRep& alpha, long n_max) {
  if (n_max < 1) throw Error(Errc::InvalidInput, "need n_max >= 1");
  std::vector<long> out;
  NeighborState st = initial_state(alpha);
  for (long n = 1; n <= n_max; ++n) {
    bool by_indices = (st.r + st.s == st.n + 1);
    // equivalent geometric characterization: (n+1)alpha lands in (-a, b)
    Real p = mod1(Real(st.n + 1) * alpha.value);
    bool by_gap = (p > 0 && p < st.b) || (p > 1 - st.a && p < 1);
    if (by_indices != by_gap)
      throw Error(Errc::PreconditionFailed,
                  "closest-return characterizations disagree at n=" +
                      std::to_string(n) + " (precision exhausted)");
    if (by_indices) out.push_back(n);
    if (n < n_max) st = advance(st, alpha);
  }
  return out;
}

std::vector<long> balanced_returns(const AlphaRep& alpha, long n_max) {
  std::vector<long> out;
  NeighborState st = initial_state(alpha);
  for (long n = 1; n <= n_max; ++n) {
    if (st.r + st.s == st.n + 1) {
      Real ratio = st.a / st.b;
      if (ratio >= Real(1) / 2 && ratio <= 2) out.push_back(n);
    }
    if (n < n_max) st = advance(st, alpha);
  }
  return out;
}

long wandering_time(long n, long r, long s) {
  auto fl = [](long v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); };
  long w = (std::min)(fl(n - r - 1), fl(n - s - 1));
  return (std::max)(w, 0L);
}

CharacteristicSchedule characteristic_times(const AlphaRep& alpha, long n_max) {
  if (n_max < 2) throw Error(Errc::InvalidInput, "need n_max >= 2");
  CharacteristicSchedule sched;
  sched.alpha = alpha;
  std::vector<NeighborState> states(n_max + 1);
  states[1] = initial_state(alpha);
  for (long n = 1; n < n_max; ++n) states[n + 1] = advance(states[n], alpha);
  for (long N = 1; N <= n_max; ++N) {
    const NeighborState& sN = states[N];
    if (sN.r + sN.s != sN.n + 1) continue;
    Real ratio = sN.a / sN.b;
    if (!(ratio >= Real(1) / 2 && ratio <= 2)) continue;
    bool dichotomy = (sN.a < sN.b) ? (sN.r <= 2 * sN.s) : (sN.s <= 2 * sN.r);
    if (!dichotomy) continue;
    ScheduleEntry e;
    e.N = N;
    e.k = N - 1;
    if (e.k >= 1) {
      const NeighborState& sk = states[e.k];
      e.r = sk.r;
      e.s = sk.s;
      e.a = sk.a;
      e.b = sk.b;
      e.w = wandering_time(e.k, sk.r, sk.s);
      e.adapted = e.k >= 2 && sk.r != e.k && sk.s != e.k && sk.r + sk.s != e.k + 1;
    } else {
      // segment of length 0 has no neighbor geometry
      e.a = e.b = Real(0);
    }
    sched.entries.push_back(e);
  }
  return sched;
}

}  // namespace circdiff
