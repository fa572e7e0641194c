#include "circdiff/rotation_combinatorics.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace circdiff;

namespace {
double dbl(const Real& v) { return static_cast<double>(v); }

NeighborState state_at(const AlphaRep& alpha, long n) {
  NeighborState st = initial_state(alpha);
  for (long m = 1; m < n; ++m) st = advance(st, alpha);
  return st;
}
}  // namespace

TEST_CASE("initial state is the literal pair of circular distances") {
  AlphaRep g = AlphaRep::golden();
  NeighborState st = initial_state(g);
  CHECK(st.r == 1);
  CHECK(st.s == 1);
  CHECK(dbl(abs(st.a - (1 - g.value))) == 0);
  CHECK(dbl(abs(st.b - g.value)) == 0);

  // alpha < 1/2 gives a literal left distance above 1/2; the recurrence is
  // self-correcting from there (checked against the oracle below)
  AlphaRep s2 = AlphaRep::sqrt2_minus_1();
  NeighborState st2 = initial_state(s2);
  CHECK(dbl(abs(st2.a - (1 - s2.value))) == 0);
  CHECK(dbl(abs(st2.b - s2.value)) == 0);
}

TEST_CASE("advance reproduces the documented golden states") {
  AlphaRep g = AlphaRep::golden();
  NeighborState s2 = state_at(g, 2);
  CHECK(s2.r == 1);
  CHECK(s2.s == 2);
  CHECK(dbl(abs(s2.a - Real("0.3819660113"))) < 1e-9);
  CHECK(dbl(abs(s2.b - Real("0.2360679775"))) < 1e-9);

  NeighborState s3 = state_at(g, 3);
  CHECK(s3.r == 3);
  CHECK(s3.s == 2);
  CHECK(dbl(abs(s3.a - Real("0.1458980338"))) < 1e-9);

  // n=3 -> 4 unchanged apart from n (r+s = 5 != 4)
  NeighborState s4 = advance(s3, g);
  CHECK(s4.n == 4);
  CHECK(s4.r == 3);
  CHECK(s4.s == 2);
  CHECK(s4.a == s3.a);

  NeighborState s7 = state_at(g, 7);
  CHECK(s7.r == 3);
  CHECK(s7.s == 5);
  NeighborState s8 = advance(s7, g);
  CHECK(s8.r == 8);
  CHECK(s8.s == 5);
  CHECK(dbl(abs(s8.a - Real("0.05572809"))) < 1e-8);
  CHECK(s8.b == s7.b);
}

TEST_CASE("brute force oracle matches documented values") {
  AlphaRep g = AlphaRep::golden();
  NeighborState b3 = brute_force_neighbors(g, 3);
  CHECK(b3.r == 3);
  CHECK(b3.s == 2);
  CHECK(dbl(abs(b3.a - Real("0.1458980338"))) < 1e-9);
  CHECK(dbl(abs(b3.b - Real("0.2360679775"))) < 1e-9);
  NeighborState b7 = brute_force_neighbors(g, 7);
  CHECK(b7.r == 3);
  CHECK(b7.s == 5);
  NeighborState b12 = brute_force_neighbors(g, 12);
  CHECK(b12.r == 8);
  CHECK(b12.s == 5);
}

TEST_CASE("oracle equivalence on a medium range, all three alphas") {
  for (const AlphaRep& alpha : {AlphaRep::golden(), AlphaRep::sqrt2_minus_1(),
                                AlphaRep::e_minus_2()}) {
    NeighborOracle oracle(alpha);
    NeighborState st = initial_state(alpha);
    for (long n = 1; n < 512; ++n) {
      st = advance(st, alpha);
      NeighborState bf = oracle.grow();
      REQUIRE(st.r == bf.r);
      REQUIRE(st.s == bf.s);
      REQUIRE(dbl(abs(st.a - bf.a)) < 1e-12 * n);
      REQUIRE(dbl(abs(st.b - bf.b)) < 1e-12 * n);
    }
  }
}

TEST_CASE("three-gap property along the orbit") {
  AlphaRep alpha = AlphaRep::e_minus_2();
  NeighborOracle oracle(alpha);
  NeighborState st = initial_state(alpha);
  for (long n = 1; n < 256; ++n) {
    st = advance(st, alpha);
    oracle.grow();
    std::vector<Real> gaps = oracle.gap_lengths();
    for (const Real& gl : gaps) {
      bool ok = dbl(abs(gl - st.a)) < 1e-10 || dbl(abs(gl - st.b)) < 1e-10 ||
                dbl(abs(gl - st.a - st.b)) < 1e-10;
      REQUIRE(ok);
    }
  }
}

TEST_CASE("closest returns: golden gives Fibonacci, sqrt2 the documented list") {
  AlphaRep g = AlphaRep::golden();
  CHECK(closest_return_times(g, 25) == std::vector<long>{1, 2, 4, 7, 12, 20});
  AlphaRep s2 = AlphaRep::sqrt2_minus_1();
  CHECK(closest_return_times(s2, 30) == std::vector<long>{1, 2, 4, 6, 11, 16, 28});
  // n_max = 1 always yields {1}
  CHECK(closest_return_times(AlphaRep::e_minus_2(), 1) == std::vector<long>{1});
}

TEST_CASE("closest-return characterizations agree for n <= 4096") {
  // the membership test runs inside closest_return_times and throws on any
  // disagreement
  for (const AlphaRep& alpha : {AlphaRep::golden(), AlphaRep::sqrt2_minus_1(),
                                AlphaRep::e_minus_2()})
    CHECK_NOTHROW((void)closest_return_times(alpha, 4096));
}

TEST_CASE("balanced returns") {
  AlphaRep g = AlphaRep::golden();
  // golden ratio: every return is balanced
  CHECK(balanced_returns(g, 25) == closest_return_times(g, 25));

  // CF [0; 1, 10, 1, 10, ...]: x^2 + 10x - 10 = 0
  AlphaRep spiky = AlphaRep::from_value(sqrt(Real(35)) - 5);
  auto all = closest_return_times(spiky, 200);
  auto bal = balanced_returns(spiky, 200);
  CHECK(bal.size() < all.size());
  CHECK(bal == std::vector<long>{10, 11, 130, 142});

  // below the first balanced return the list is empty
  CHECK(balanced_returns(spiky, 9).empty());
}

TEST_CASE("wandering time formula") {
  CHECK(wandering_time(7, 3, 5) == 0);
  CHECK(wandering_time(12, 8, 5) == 1);
  CHECK(wandering_time(19, 8, 13) == 2);
  CHECK(wandering_time(1, 1, 1) == 0);  // floored at zero
}

TEST_CASE("characteristic schedule for golden alpha") {
  AlphaRep g = AlphaRep::golden();
  CharacteristicSchedule sched = characteristic_times(g, 25);
  std::vector<long> ks;
  for (const auto& e : sched.entries) ks.push_back(e.k);
  CHECK(ks == std::vector<long>{0, 1, 3, 6, 11, 19});

  const ScheduleEntry& k6 = sched.entries[3];
  CHECK(k6.k == 6);
  CHECK(k6.r == 3);
  CHECK(k6.s == 5);
  CHECK(k6.w == 0);
  CHECK(k6.adapted);

  const ScheduleEntry& k11 = sched.entries[4];
  CHECK(k11.r == 8);
  CHECK(k11.s == 5);
  CHECK(k11.w == 1);
  CHECK(k11.adapted);

  const ScheduleEntry& k19 = sched.entries[5];
  CHECK(k19.r == 8);
  CHECK(k19.s == 13);
  CHECK(k19.w == 2);
  CHECK(k19.adapted);

  const ScheduleEntry& k3 = sched.entries[2];
  CHECK(k3.k == 3);
  CHECK_FALSE(k3.adapted);

  // every emitted N satisfies r+s = N+1 (checked on the state at N)
  for (const auto& e : sched.entries) {
    if (e.k < 1) continue;
    NeighborState sN = state_at(g, e.N);
    CHECK(sN.r + sN.s == e.N + 1);
  }
}

TEST_CASE("wandering-window disjointness at characteristic times") {
  AlphaRep g = AlphaRep::golden();
  CharacteristicSchedule sched = characteristic_times(g, 150);
  for (const auto& e : sched.entries) {
    if (!e.adapted || e.w < 1) continue;
    // arcs I, R(I), ..., R^w(I), R^-w(J), ..., J pairwise disjoint
    Real a = e.a, b = e.b;
    Real I_left = mod1(-a);
    Real J_left = mod1(Real(e.k - e.s) * g.value);
    std::vector<CircleArc> fam;
    for (long j = 0; j <= e.w; ++j) {
      fam.emplace_back(mod1(I_left + Real(j) * g.value),
                       mod1(I_left + Real(j) * g.value + a + b));
      fam.emplace_back(mod1(J_left - Real(j) * g.value),
                       mod1(J_left - Real(j) * g.value + a + b));
    }
    CHECK(pairwise_disjoint(fam));
  }
}

TEST_CASE("time-ratio corollary at emitted returns") {
  for (const AlphaRep& alpha : {AlphaRep::golden(), AlphaRep::sqrt2_minus_1(),
                                AlphaRep::e_minus_2()}) {
    CharacteristicSchedule sched = characteristic_times(alpha, 2048);
    for (const auto& e : sched.entries) {
      if (e.k < 2) continue;
      NeighborState sN = state_at(alpha, e.N);
      long wN = wandering_time(e.N, sN.r, sN.s);
      if (sN.a < sN.b)
        CHECK(sN.r / 4 - 1 <= wN);
      else
        CHECK(sN.s / 4 - 1 <= wN);
    }
  }
}

TEST_CASE("alpha representation guards") {
  CHECK_THROWS_AS((void)AlphaRep::from_value(Real("0.5")), Error);
  AlphaRep cf = AlphaRep::from_cf({1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
                                   1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(dbl(abs(cf.value - circdiff::testing::golden())) < 1e-11);
}
