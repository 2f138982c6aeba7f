#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hubergd/config.hpp"
#include "hubergd/data.hpp"
#include "hubergd/error.hpp"
#include "hubergd/model.hpp"
#include "hubergd/trainer.hpp"

using namespace hubergd;

namespace {

TrainConfig xor_config(std::uint64_t seed, int T) {
  ExperimentConfig ec = preset_config("xor");
  ec.train.seed = seed;
  ec.train.T = T;
  return ec.train_config(0);
}

}  // namespace

TEST_SUITE("trainer") {
  TEST_CASE("initialize: zero sigma, determinism, coupling") {
    TrainConfig c;
    c.p = 5;
    c.d = 3;
    c.sigma = 0.0;
    CHECK(initialize(c).max_abs() == 0.0);
    c.sigma = 0.3;
    c.seed = 42;
    CHECK(initialize(c) == initialize(c));
    CHECK(initialize(c).rows() == 10);
    CHECK(initialize(c).dim() == 4);
    c.with_bias = true;
    const ParamMatrix a = initialize(c);
    c.with_bias = false;
    const ParamMatrix b = initialize(c);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(b.values()[k] == std::sqrt(2.0) * a.values()[k]);
  }

  TEST_CASE("initialize: empirical deviation over 2e6 entries within 2% of sigma") {
    TrainConfig c;
    c.p = 50000;
    c.d = 19;
    c.with_bias = true;
    c.seed = 5;
    const ParamMatrix V = initialize(c);
    REQUIRE(V.size() >= 1000000);
    double sum = 0, sq = 0;
    for (double v : V.values()) {
      sum += v;
      sq += v * v;
    }
    const double n = static_cast<double>(V.size());
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
    CHECK(std::abs(sd / c.resolved_sigma() - 1.0) < 0.02);
  }

  TEST_CASE("zero init gives a constant ln 2 trajectory") {
    TrainConfig c = xor_config(1, 20);
    c.sigma = 0.0;
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 1);
    const TrainResult r = train(c, raw);
    REQUIRE(r.records.size() == 21);
    for (const auto& rec : r.records) {
      CHECK(rec.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
      CHECK(rec.grad_norm == 0.0);
      CHECK(std::isnan(rec.alignment));
    }
    CHECK(r.final.max_abs() == 0.0);
  }

  TEST_CASE("fixed step: one update is V0 - alpha grad(V0) exactly") {
    TrainConfig c = xor_config(3, 1);
    c.schedule.policy = StepPolicy::fixed;
    c.schedule.fixed_alpha = 0.37;
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 3);
    const TrainResult r = train(c, raw);
    const WorkingProblem wp = make_working_problem(c, raw);
    ParamMatrix expect = initialize(c);
    expect.axpy(-0.37, grad(expect, wp.data, c.resolved_activation()));
    CHECK(r.final == expect);
    CHECK(r.records.size() == 2);
    CHECK(r.records[0].step_size == 0.37);
    CHECK(r.records[1].step_size == 0.0);
  }

  TEST_CASE("first update uses alpha0, later ones the schedule") {
    TrainConfig c = xor_config(4, 3);
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 4);
    const TrainResult r = train(c, raw);
    CHECK(r.records[0].step_size == c.resolved_alpha0());
    const double l = std::log(1.0 / r.records[1].loss);
    CHECK(r.records[1].step_size == doctest::Approx(l * l / c.p).epsilon(1e-15));
    REQUIRE(r.after_first.has_value());
  }

  TEST_CASE("log-squared XOR run decreases after the first update") {
    const TrainConfig c = xor_config(7, 100);
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 7);
    const TrainResult r = train(c, raw);
    CHECK_FALSE(r.abort_reason.has_value());
    CHECK(r.records.size() == 101);
    for (std::size_t k = 2; k < r.records.size(); ++k) CHECK(r.records[k].loss <= r.records[k - 1].loss);
    CHECK_FALSE(r.any_failed());
    // Theorem-1 columns do not apply under this policy.
    CHECK(r.records[5].flags.i1 == Verdict::na);
    CHECK(r.records[5].flags.i2 == Verdict::na);
  }

  TEST_CASE("trajectories are bit-reproducible") {
    const TrainConfig c = xor_config(8, 30);
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 8);
    const TrainResult a = train(c, raw), b = train(c, raw);
    CHECK(a.final == b.final);
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].loss == b.records[k].loss);
      CHECK(a.records[k].grad_norm == b.records[k].grad_norm);
    }
  }

  TEST_CASE("equivalence of explicit-bias and lifted training") {
    TrainConfig c = xor_config(9, 1);
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 9);
    CHECK(train_equivalence_check(c, raw).max_discrepancy <= 1e-10);
    c.sigma = 0.0;
    c.T = 10;
    CHECK(train_equivalence_check(c, raw).max_discrepancy == 0.0);
  }

  TEST_CASE("non-finite values abort with a diagnostic") {
    TrainConfig c = xor_config(10, 5);
    c.schedule.policy = StepPolicy::fixed;
    c.schedule.fixed_alpha = 1e307;
    const Dataset raw = generate_mixture(MixtureSpec::xor_preset(), 10);
    const TrainResult r = train(c, raw);
    REQUIRE(r.abort_reason.has_value());
    CHECK(r.abort_reason->find("non-finite") != std::string::npos);
    CHECK(r.records.size() < 6);
  }

  TEST_CASE("strict mode propagates the schedule domain error") {
    // A start whose loss exceeds 1: every example misclassified.
    Dataset D;
    D.dim = 2;
    D.push_back(std::vector<double>{1.0, 0.0}, -1);
    ParamMatrix V(1, 2);
    V(0, 0) = 5.0;
    DescentOptions opt;
    opt.activation = Activation::huberized(1.0);
    opt.schedule.policy = StepPolicy::log_squared;
    opt.schedule.strict = true;
    opt.p = 1;
    opt.T = 2;
    opt.initial_step = false;
    try {
      descend(V, D, opt);
      FAIL("expected domain error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
    }
    opt.schedule.strict = false;
    const TrainResult r = descend(V, D, opt);
    CHECK(r.records[0].step_capped);
  }

  TEST_CASE("config validation") {
    TrainConfig c;
    c.p = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.p = 3;
    c.h = -1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    TrainConfig d;
    d.d = 3;
    CHECK_THROWS_AS(make_working_problem(d, generate_mixture(MixtureSpec::xor_preset(), 1)), Error);
  }
}
