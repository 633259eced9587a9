#include <doctest.h>

#include <cmath>
#include <limits>

#include "lift/common/error.hpp"
#include "lift/rnle/rnle.hpp"

using namespace lift;
using namespace lift::rnle;

TEST_CASE("unit multipliers give the load constant") {
  const MultiplierSet unit;
  CHECK(compute_rwl(unit) == 23.0);
  for (double load : {1.0, 5.0, 23.0, 40.0}) CHECK(compute_li(load, compute_rwl(unit)) == load / 23.0);

  // The default task sits at every multiplier's optimum.
  const auto m = compute_multipliers(RnleTask{});
  CHECK(compute_rwl(m) == 23.0);
}

TEST_CASE("worked example") {
  // H 40 cm, V 30 cm, D 45 cm, A 30 deg, 1 lift/min for <= 1 h, fair coupling, 10 kg.
  //   HM = 25/40 = 0.625         VM = 1 - 0.003*45 = 0.865
  //   DM = 0.82 + 4.5/45 = 0.92  AM = 1 - 0.0032*30 = 0.904
  //   FM = 0.94 (table)          CM = 0.95 (fair, V < 75)
  //   RWL = 23 * product = 9.23489 kg, LI = 10 / RWL = 1.08285
  RnleTask t{40, 30, 45, 30, 1.0, DurationClass::UpTo1h, Coupling::Fair, 10.0};
  const auto m = compute_multipliers(t);
  CHECK(m.hm == doctest::Approx(0.625));
  CHECK(m.vm == doctest::Approx(0.865));
  CHECK(m.dm == doctest::Approx(0.92));
  CHECK(m.am == doctest::Approx(0.904));
  CHECK(m.fm == doctest::Approx(0.94));
  CHECK(m.cm == doctest::Approx(0.95));
  const double rwl = compute_rwl(m);
  CHECK(rwl == doctest::Approx(23.0 * 0.625 * 0.865 * 0.92 * 0.904 * 0.94 * 0.95).epsilon(1e-12));
  CHECK(rwl == doctest::Approx(9.23489).epsilon(1e-5));
  CHECK(compute_li(10.0, rwl) == doctest::Approx(1.08285).epsilon(1e-5));
}

TEST_CASE("RWL is non-increasing in H, |V - 75|, A and F") {
  auto rwl = [](RnleTask t) { return compute_rwl(compute_multipliers(t)); };
  for (auto duration : {DurationClass::UpTo1h, DurationClass::UpTo2h, DurationClass::UpTo8h})
    for (auto coupling : {Coupling::Good, Coupling::Fair, Coupling::Poor}) {
      RnleTask base{30, 60, 40, 20, 2.0, duration, coupling, 10.0};
      double prev = std::numeric_limits<double>::infinity();
      for (double h = 0; h <= 80; h += 0.5) {
        auto t = base;
        t.h_cm = h;
        CHECK(rwl(t) <= prev);
        prev = rwl(t);
      }
      for (double side : {-1.0, 1.0}) {
        prev = std::numeric_limits<double>::infinity();
        for (double dv = 0; dv <= 110; dv += 0.5) {
          auto t = base;
          t.v_cm = 75.0 + side * dv;
          if (t.v_cm < 0) break;
          CHECK(rwl(t) <= prev);
          prev = rwl(t);
        }
      }
      prev = std::numeric_limits<double>::infinity();
      for (double a = 0; a <= 135; a += 1) {
        auto t = base;
        t.a_deg = a;
        CHECK(rwl(t) <= prev);
        prev = rwl(t);
      }
      prev = std::numeric_limits<double>::infinity();
      for (double f = 0; f <= 16; f += 0.05) {
        auto t = base;
        t.f_lpm = f;
        CHECK(rwl(t) <= prev + 1e-15);
        prev = rwl(t);
      }
    }
}

TEST_CASE("multipliers stay within [0, 1]") {
  for (double h = 0; h <= 70; h += 7)
    for (double v = 0; v <= 180; v += 15)
      for (double d = 0; d <= 180; d += 30)
        for (double f : {0.0, 0.2, 3.5, 9.0, 14.9, 15.5}) {
          const auto m = compute_multipliers({h, v, d, 45.0, f, DurationClass::UpTo8h, Coupling::Poor, 5.0});
          for (double x : {m.hm, m.vm, m.dm, m.am, m.fm, m.cm}) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
          }
          CHECK(compute_rwl(m) <= 23.0);
        }
}

TEST_CASE("frequency table interpolation and limits") {
  CHECK(frequency_multiplier(0.0, 30, DurationClass::UpTo1h) == 1.0);
  CHECK(frequency_multiplier(1.5, 30, DurationClass::UpTo1h) == doctest::Approx(0.925));
  CHECK(frequency_multiplier(9, 30, DurationClass::UpTo8h) == 0.0);
  CHECK(frequency_multiplier(9, 80, DurationClass::UpTo8h) == doctest::Approx(0.15));
  CHECK(frequency_multiplier(15.01, 80, DurationClass::UpTo1h) == 0.0);
}

TEST_CASE("out-of-range geometry zeroes the multiplier") {
  CHECK(compute_multipliers({64, 75, 25, 0, 0.2}).hm == 0.0);
  CHECK(compute_multipliers({25, 176, 25, 0, 0.2}).vm == 0.0);
  CHECK(compute_multipliers({25, 75, 176, 0, 0.2}).dm == 0.0);
  CHECK(compute_li(5.0, 0.0) == std::numeric_limits<double>::infinity());
}

TEST_CASE("invalid tasks") {
  CHECK_THROWS_AS(compute_multipliers({-1, 75, 25, 0, 0.2}), Error);
  CHECK_THROWS_AS(compute_multipliers({25, 75, 25, 140, 0.2}), Error);
  CHECK_THROWS_AS(compute_li(0.0, 10.0), Error);
  CHECK_THROWS_AS(parse_duration("3h"), Error);
  CHECK(parse_coupling("fair") == Coupling::Fair);
}
