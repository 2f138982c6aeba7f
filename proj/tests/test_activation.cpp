#include <cmath>
#include <limits>

#include "doctest.h"
#include "hubergd/activation.hpp"
#include "hubergd/error.hpp"
#include "hubergd/rng.hpp"

using namespace hubergd;

TEST_SUITE("activation") {
  TEST_CASE("huberized values on each branch") {
    const auto a = Activation::huberized(0.5);
    CHECK(phi(-1.0, a) == 0.0);
    CHECK(phi(0.25, a) == doctest::Approx(0.0625).epsilon(1e-15));
    CHECK(phi(1.0, a) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(phi_prime(0.0, a) == 0.0);
    CHECK(phi_prime(0.25, a) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(phi_prime(2.0, a) == 1.0);
  }

  TEST_CASE("gamma is 1/h on the closed band") {
    CHECK(gamma(0.25, 0.5) == 2.0);
    CHECK(gamma(-0.1, 0.5) == 0.0);
    CHECK(gamma(0.6, 0.5) == 0.0);
    CHECK(gamma(0.0, 0.5) == 2.0);
    CHECK(gamma(0.5, 0.5) == 2.0);
  }

  TEST_CASE("standard relu") {
    const auto r = Activation::standard_relu();
    CHECK_FALSE(r.is_huberized());
    CHECK(phi(-2.0, r) == 0.0);
    CHECK(phi(3.0, r) == 3.0);
    CHECK(phi_prime(0.0, r) == 0.0);
    CHECK(phi_prime(1e-300, r) == 1.0);
    CHECK(phi_prime(-1e-300, r) == 0.0);
  }

  TEST_CASE("errors") {
    CHECK_THROWS_AS(Activation::huberized(0.0), Error);
    CHECK_THROWS_AS(Activation::huberized(-1.0), Error);
    CHECK_THROWS_AS(Activation::huberized(std::numeric_limits<double>::infinity()), Error);
    const auto a = Activation::huberized(0.5);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      phi(nan, a);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_input);
    }
    CHECK_THROWS_AS(phi_prime(std::numeric_limits<double>::infinity(), a), Error);
    try {
      gamma(0.1, 0.0);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_parameter);
    }
  }

  TEST_CASE("continuity and C1 at the band edges") {
    for (double h : {1e-3, 0.1, 0.5, 2.0}) {
      const auto a = Activation::huberized(h);
      const double e = 1e-12;
      CHECK(std::abs(phi(h + e, a) - phi(h - e, a)) < 1e-11);
      CHECK(std::abs(phi_prime(h + e, a) - phi_prime(h - e, a)) < 1e-9 / h + 1e-9);
      CHECK(std::abs(phi(e, a) - phi(-e, a)) < 1e-11);
    }
  }

  TEST_CASE("property: phi <= phi' z <= phi + h/2, Lipschitz, monotone, nonnegative") {
    Rng rng(11);
    for (double h : {0.01, 0.1, 0.5, 1.0}) {
      const auto a = Activation::huberized(h);
      std::vector<double> zs;
      for (int k = -400; k <= 400; ++k) zs.push_back(k * 0.01);
      for (int k = 0; k < 2000; ++k) zs.push_back(rng.uniform(-5.0, 5.0));
      double prev_z = -1e9, prev = 0.0;
      std::sort(zs.begin(), zs.end());
      for (double z : zs) {
        const double v = phi(z, a), dz = phi_prime(z, a) * z;
        CHECK(v >= 0.0);
        CHECK(v <= dz + 1e-15);
        CHECK(dz <= v + h / 2 + 1e-15);
        CHECK(v >= prev);
        CHECK(std::abs(v - prev) <= std::abs(z - prev_z) + 1e-15);
        CHECK(phi_prime(z, a) >= 0.0);
        CHECK(phi_prime(z, a) <= 1.0);
        prev = v;
        prev_z = z;
      }
    }
  }

  TEST_CASE("property: phi' and gamma match central differences away from kinks") {
    Rng rng(12);
    for (double h : {0.05, 0.5, 1.0}) {
      const auto a = Activation::huberized(h);
      int tested = 0;
      while (tested < 500) {
        const double z = rng.uniform(-2.0, 3.0);
        if (std::abs(z) < 1e-3 || std::abs(z - h) < 1e-3) continue;
        ++tested;
        const double eps = 1e-6;
        const double fd = (phi(z + eps, a) - phi(z - eps, a)) / (2 * eps);
        const double ex = phi_prime(z, a);
        CHECK(std::abs(fd - ex) <= 1e-8 * std::max(1.0, std::abs(ex)));
        const double fd2 = (phi_prime(z + eps, a) - phi_prime(z - eps, a)) / (2 * eps);
        CHECK(std::abs(fd2 - gamma(z, h)) <= 1e-6 * std::max(1.0, 1.0 / h));
      }
    }
  }
}
