#include <cmath>

#include "doctest.h"
#include "hubergd/data.hpp"
#include "hubergd/error.hpp"

using namespace hubergd;

namespace {

double ip(std::span<const double> a, std::span<const double> b) {
  double acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

ClusterSpec xor_style_centers(double delta) {
  const double a = std::sqrt(0.5);
  ClusterSpec s;
  s.centers = {std::vector<double>{a, -a}, {-a, a}, {a, a}, {-a, -a}};
  s.radius = 0.05;
  s.separation = delta;
  s.balance = 0.05;
  s.n = 64;
  return s;
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("generated clusters pass the validator, lifted and not") {
    for (std::size_t d : {4, 10, 25}) {
      for (double r : {0.0, 0.02, 0.05, 0.2}) {
        const ClusterSpec spec = ClusterSpec::orthogonal(d, r, 0.05, 0.05, 128);
        const Dataset D = generate_clusters(spec, 17 + d);
        CHECK(D.size() == 128);
        CHECK(validate_assumptions(D, spec).all_passed());
        const Dataset L = lift_dataset(D);
        const ValidationReport rep = validate_assumptions(L, spec);
        CHECK(rep.all_passed());
        CHECK(rep.find("lifted opposite-label inner product")->passed);
        CHECK(rep.find("lifted same-cluster inner product")->passed);
      }
    }
  }

  TEST_CASE("zero radius reproduces the centers") {
    const ClusterSpec spec = ClusterSpec::orthogonal(6, 0.0, 0.05, 0.05, 20);
    const Dataset D = generate_clusters(spec, 3);
    for (std::size_t s = 0; s < D.size(); ++s) {
      const auto& mu = spec.centers[D.cluster_of[s] - 1];
      for (std::size_t j = 0; j < 6; ++j) CHECK(D.feature(s)[j] == mu[j]);
    }
    CHECK(validate_assumptions(D, spec).all_passed());
  }

  TEST_CASE("generation is deterministic in the seed") {
    const ClusterSpec spec = ClusterSpec::orthogonal(10, 0.05, 0.05, 0.05, 128);
    CHECK(generate_clusters(spec, 5) == generate_clusters(spec, 5));
    CHECK_FALSE(generate_clusters(spec, 5) == generate_clusters(spec, 6));
    const auto m = MixtureSpec::xor_preset();
    CHECK(generate_mixture(m, 9) == generate_mixture(m, 9));
  }

  TEST_CASE("a sample pushed outside the radius is caught with its index") {
    const ClusterSpec spec = ClusterSpec::orthogonal(10, 0.05, 0.05, 0.05, 40);
    Dataset D = generate_clusters(spec, 8);
    // Move sample 13 to distance r + 0.1 from its center, staying on the sphere.
    const auto& mu = spec.centers[D.cluster_of[13] - 1];
    const double target = spec.radius + 0.1;
    auto x = D.feature(13);
    const std::size_t other = static_cast<std::size_t>(D.cluster_of[13]) % 10;  // axis orthogonal to mu
    const double c = 1.0 - target * target / 2.0, s = std::sqrt(1.0 - c * c);
    for (std::size_t j = 0; j < 10; ++j) x[j] = c * mu[j];
    x[other] += s;
    const ValidationReport rep = validate_assumptions(D, spec);
    const auto* radius = rep.find("cluster radius");
    REQUIRE(radius != nullptr);
    CHECK_FALSE(radius->passed);
    CHECK(radius->worst_value == doctest::Approx(target).epsilon(1e-9));
    CHECK(radius->witness.find("sample 13") != std::string::npos);
  }

  TEST_CASE("infeasible specs name the assumption") {
    auto expect = [](const ClusterSpec& s, const std::string& name) {
      try {
        generate_clusters(s, 1);
        FAIL("expected spec_validation");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::spec_validation);
        CHECK(std::string(e.what()).find(name) != std::string::npos);
      }
    };
    ClusterSpec s = ClusterSpec::orthogonal(4, 0.05, 0.05, 0.05, 128);
    s.centers[2] = {0.6, 0.8, 0.0, 0.0};  // mu_1 . mu_3 = 0.6 > Delta
    expect(s, "separation");
    ClusterSpec b = ClusterSpec::orthogonal(4, 0.05, 0.05, -0.1, 128);
    expect(b, "cluster balance");
    ClusterSpec c = ClusterSpec::orthogonal(4, 0.05, 0.05, 0.05, 128);
    c.centers[0] = {2.0, 0.0, 0.0, 0.0};
    expect(c, "center norms");
    ClusterSpec r = ClusterSpec::orthogonal(4, 1.5, 0.05, 0.05, 128);
    expect(r, "cluster radius");
  }

  TEST_CASE("XOR-style centers satisfy separation for any nonnegative delta") {
    for (double delta : {0.0, 0.01, 0.3}) {
      const ClusterSpec spec = xor_style_centers(delta);
      const Dataset D = generate_clusters(spec, 2);
      const ValidationReport rep = validate_assumptions(D, spec);
      CHECK(rep.find("separation")->passed);
      CHECK(std::abs(rep.find("separation")->worst_value) < 1e-15);
    }
  }

  TEST_CASE("mixtures") {
    const Dataset D = generate_mixture(MixtureSpec::xor_preset(128), 1);
    CHECK(D.size() == 128);
    CHECK(D.dim == 2);
    const auto spec = MixtureSpec::xor_preset(128);
    // Component means per label: positives cycle through components 0, 1; negatives 2, 3.
    std::array<std::array<double, 2>, 4> sum{};
    std::array<int, 4> cnt{};
    for (std::size_t s = 0; s < D.size(); ++s) {
      CHECK((D.labels[s] == 1 || D.labels[s] == -1));
      const std::size_t comp = (D.labels[s] == 1 ? 0 : 2) + (s / 2) % 2;
      sum[comp][0] += D.feature(s)[0];
      sum[comp][1] += D.feature(s)[1];
      ++cnt[comp];
    }
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(cnt[k] == 32);
      CHECK(std::abs(sum[k][0] / cnt[k] - spec.components[k].mean[0]) < 0.05);
      CHECK(std::abs(sum[k][1] / cnt[k] - spec.components[k].mean[1]) < 0.05);
    }

    auto tiny = MixtureSpec::xor_preset(16);
    tiny.covariance_scale = 1e-30;
    const Dataset T = generate_mixture(tiny, 4);
    for (std::size_t s = 0; s < T.size(); ++s) {
      const auto& mu = tiny.components[(T.labels[s] == 1 ? 0 : 2) + (s / 2) % 2].mean;
      CHECK(std::abs(T.feature(s)[0] - mu[0]) < 1e-13);
      CHECK(std::abs(T.feature(s)[1] - mu[1]) < 1e-13);
    }

    const auto sh = MixtureSpec::shoulders_preset();
    CHECK(sh.components[0].mean == std::vector<double>{1.0, 0.0});
    CHECK(sh.components[1].mean == std::vector<double>{0.0, 1.0});
    CHECK(sh.components[0].label == 1);
    CHECK(sh.components[1].label == 1);

    auto empty = MixtureSpec::xor_preset(128);
    empty.n = 0;
    try {
      generate_mixture(empty, 1);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_input);
    }
    const Dataset N = generate_mixture(MixtureSpec::shoulders_preset(50), 3, true);
    CHECK(N.max_feature_norm() == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("lifting") {
    const auto y = lift_point({0.6, 0.8});
    CHECK(y[0] == doctest::Approx(0.6 / std::sqrt(2.0)));
    CHECK(y[1] == doctest::Approx(0.8 / std::sqrt(2.0)));
    CHECK(y[2] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::sqrt(ip(y, y)) == doctest::Approx(1.0).epsilon(1e-15));

    Dataset D;
    D.dim = 2;
    const std::vector<double> a{0.6, 0.8}, b{-0.6, -0.8};
    D.push_back(a, 1);
    D.push_back(b, -1);
    D.push_back(a, 1);
    const Dataset L = lift_dataset(D);
    CHECK(L.lifted);
    CHECK(L.dim == 3);
    CHECK(std::abs(ip(L.feature(0), L.feature(1))) < 1e-15);
    CHECK(ip(L.feature(0), L.feature(2)) == doctest::Approx(1.0).epsilon(1e-15));

    Dataset bad = D;
    bad.features[0] = 0.7;
    CHECK_THROWS_AS(lift_dataset(bad), Error);

    const auto ls = lift_init_and_steps(0.1, {0.5, 0.25});
    CHECK(ls.sigma == doctest::Approx(0.141421).epsilon(1e-6));
    CHECK(ls.steps == std::vector<double>{1.0, 0.5});
    CHECK(lift_init_and_steps(0.1, {}).steps.empty());
  }

  TEST_CASE("property: lifting keeps unit norms and makes inner products nonnegative") {
    const Dataset D = random_unit_points(7, 60, 21);
    const Dataset L = lift_dataset(D);
    for (std::size_t s = 0; s < L.size(); ++s) {
      CHECK(std::abs(std::sqrt(ip(L.feature(s), L.feature(s))) - 1.0) <= 1e-15);
      for (std::size_t q = 0; q < L.size(); ++q) {
        CHECK(ip(L.feature(s), L.feature(q)) >= -1e-15);
        CHECK(ip(L.feature(s), L.feature(q)) ==
              doctest::Approx((ip(D.feature(s), D.feature(q)) + 1.0) / 2.0).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("cluster sizes split n evenly") {
    for (std::size_t n : {1, 4, 7, 128, 130}) {
      const auto s = cluster_sizes(n);
      CHECK(s[0] + s[1] + s[2] + s[3] == n);
      CHECK(*std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()) <= 1);
    }
  }
}
