#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hubergd/error.hpp"
#include "hubergd/rng.hpp"
#include "hubergd/schedule.hpp"

using namespace hubergd;

TEST_SUITE("schedule") {
  TEST_CASE("q1_tilde and q2_tilde at L1 = 0.01, ||V1|| = 1, p = 10") {
    const double e2 = std::exp(2.0);
    // The three terms, evaluated independently.
    const double l = std::log(100.0);
    const double t1 = 1.0 / (30 * 10 * 0.01 * l * l);
    const double t2 = 108.0 / (125 * 0.01 * std::pow(l, 4));
    const double t3 = e2 / 1200.0;
    CHECK(t3 < t1);
    CHECK(t3 < t2);
    const double q1 = q1_tilde(0.01, 1.0, 10);
    CHECK(q1 == doctest::Approx(0.0061577).epsilon(1e-4));
    CHECK(q1 == doctest::Approx(t3).epsilon(1e-15));
    const double q2 = q2_tilde(q1, 0.01, 1.0);
    CHECK(q2 == doctest::Approx(1.602e-2).epsilon(1e-3));
    CHECK(q2 == doctest::Approx(q1 * 0.01 * std::pow(l, 4) * 125 / 216).epsilon(1e-14));
  }

  TEST_CASE("huge ||V1|| leaves min of the first and third terms") {
    for (double L1 : {1e-3, 1e-8, 0.3}) {
      for (int p : {1, 10, 400}) {
        const double l = std::log(1 / L1);
        const double expected = std::min(1.0 / (30.0 * p * L1 * l * l), std::exp(2.0) / (120.0 * p));
        CHECK(q1_tilde(L1, 1e200, p) == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }

  TEST_CASE("domain errors") {
    for (double L1 : {1.0, 2.0, 0.0, -0.5}) {
      try {
        q1_tilde(L1, 1.0, 10);
        FAIL("expected domain error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::domain);
      }
      CHECK_THROWS_AS(q2_tilde(0.1, L1, 1.0), Error);
    }
    CHECK_THROWS_AS(q1_tilde(0.1, 0.0, 10), Error);
    CHECK_THROWS_AS(q1_tilde(0.1, 1.0, 0), Error);
  }

  TEST_CASE("next_step_size examples") {
    ScheduleState t1;
    t1.policy = StepPolicy::theorem1;
    t1.q1 = 0.01;
    CHECK(next_step_size(t1, std::exp(-10.0), 7).alpha == doctest::Approx(1.0).epsilon(1e-14));
    ScheduleState s5;
    s5.policy = StepPolicy::log_squared;
    CHECK(next_step_size(s5, std::exp(-1.0), 100).alpha == doctest::Approx(0.01).epsilon(1e-14));
    s5.c5 = 3.0;
    CHECK(next_step_size(s5, std::exp(-1.0), 100).alpha == doctest::Approx(0.03).epsilon(1e-14));
    ScheduleState fx;
    fx.policy = StepPolicy::fixed;
    fx.fixed_alpha = 0.5;
    for (double L : {1e-9, 0.5, 3.0}) CHECK(next_step_size(fx, L, 4).alpha == 0.5);
  }

  TEST_CASE("strict and lenient handling of L_t >= 1") {
    ScheduleState s;
    s.policy = StepPolicy::log_squared;
    s.strict = true;
    try {
      next_step_size(s, 1.5, 10);
      FAIL("expected domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
    s.strict = false;
    // ln^2(1/5)/10 = 0.259 > 1/p cap.
    const StepDecision d = next_step_size(s, 5.0, 10);
    CHECK(d.capped);
    CHECK(d.alpha == doctest::Approx(0.1));
    s.alpha_max = 1.0;
    const StepDecision e = next_step_size(s, 5.0, 10);
    CHECK(e.capped);
    CHECK(e.alpha == doctest::Approx(std::pow(std::log(5.0), 2) / 10));
    CHECK_FALSE(next_step_size(s, 0.5, 10).capped);
  }

  TEST_CASE("validate") {
    ScheduleState s;
    s.policy = StepPolicy::theorem1;
    s.q1 = 0.0;
    CHECK_THROWS_AS(s.validate(), Error);
    s.q1 = 1.0;
    s.validate();
    s.alpha0 = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
  }

  TEST_CASE("property: z ln^2(1/z) <= 4/e^2 on (0, 1]") {
    double mx = 0.0;
    for (int k = 1; k <= 200000; ++k) {
      const double z = k / 200000.0;
      const double l = std::log(1 / z);
      mx = std::max(mx, z * l * l);
    }
    for (int k = 1; k < 300; ++k) {
      const double z = std::exp(-0.1 * k);
      const double l = std::log(1 / z);
      mx = std::max(mx, z * l * l);
    }
    CHECK(mx <= 4 / std::exp(2.0) + 1e-12);
    CHECK(mx >= 4 / std::exp(2.0) - 1e-6);
  }

  TEST_CASE("property: Q1 <= q1_tilde implies the base case and alpha_t L_t <= 1/(30p)") {
    Rng rng(31);
    for (int k = 0; k < 2000; ++k) {
      const double L1 = std::exp(-rng.uniform(0.01, 60.0));
      const double vn = std::exp(rng.uniform(-3.0, 5.0));
      const int p = 1 + static_cast<int>(rng.next() % 500);
      const double q1 = q1_tilde(L1, vn, p);
      CHECK(q1 <= std::exp(2.0) / (120.0 * p) * (1 + 1e-15));
      const double l = std::log(1 / L1);
      CHECK(q1 * L1 * l * l <= 1.0 / (30.0 * p) * (1 + 1e-12));
      ScheduleState s;
      s.policy = StepPolicy::theorem1;
      s.q1 = q1;
      const double Lt = rng.uniform(1e-12, 0.999);
      CHECK(next_step_size(s, Lt, p).alpha * Lt <= 1.0 / (30.0 * p) * (1 + 1e-12));
      CHECK(q2_tilde(q1, L1, vn) > 0.0);
    }
  }
}
