#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hubergd/data.hpp"
#include "hubergd/error.hpp"
#include "hubergd/model.hpp"
#include "hubergd/oracles.hpp"
#include "hubergd/suites.hpp"
#include "hubergd/verify.hpp"

using namespace hubergd;

TEST_SUITE("verify") {
  TEST_CASE("capture sets at threshold h + 4 alpha0") {
    Dataset D;
    D.dim = 1;
    D.push_back(std::vector<double>{1.0}, 1);
    D.push_back(std::vector<double>{1.0}, -1);
    ParamMatrix V(1, 1);
    V(0, 0) = 0.5;
    V(1, 0) = 0.5;
    const CaptureSets cs = capture_sets(V, D, 0.1, 0.05);
    CHECK(cs.plus[0] == std::vector<std::size_t>{0});
    CHECK(cs.minus[0] == std::vector<std::size_t>{1});
    CHECK(cs.plus[1] == std::vector<std::size_t>{1});
    CHECK(cs.minus[1] == std::vector<std::size_t>{0});
    V(0, 0) = 0.29;
    V(1, 0) = 0.31;
    const CaptureSets below = capture_sets(V, D, 0.1, 0.05);
    CHECK(below.plus[0].empty());
    CHECK(below.minus[0] == std::vector<std::size_t>{1});
  }

  TEST_CASE("concentration report is inapplicable for a zero start") {
    const ClusterSpec spec = ClusterSpec::orthogonal(10, 0.05, 0.05, 0.05, 128);
    const Dataset D = lift_dataset(generate_clusters(spec, 1));
    TrainConfig c;
    c.p = 16;
    c.d = 10;
    const ParamMatrix V0(16, 11);
    const ConcentrationReport rep = concentration_report(V0, V0, D, c, spec);
    CHECK_FALSE(rep.applicable);
    REQUIRE_FALSE(rep.rows.empty());
    for (const auto& r : rep.rows) CHECK(r.scope == "inapplicable");
    CHECK(rep.row("lemma9.part7.v1_norm_lower") != nullptr);
    CHECK(rep.row("nope") == nullptr);
  }

  TEST_CASE("concentration report counts agree with direct capture sets") {
    const ClusterSpec spec = ClusterSpec::orthogonal(10, 0.05, 0.05, 0.05, 32);
    const Dataset D = lift_dataset(generate_clusters(spec, 2));
    TrainConfig c;
    c.p = 256;
    c.d = 10;
    c.seed = 3;
    const ParamMatrix V0 = initialize(c);
    const ConcentrationReport rep = concentration_report(V0, V0, D, c, spec);
    const CaptureSets cs = capture_sets(V0, D, c.resolved_h(), c.resolved_alpha0());
    for (std::size_t s = 0; s < D.size(); ++s) {
      CHECK(rep.plus_size[s] == cs.plus[s].size());
      CHECK(rep.minus_size[s] == cs.minus[s].size());
    }
    CHECK(rep.v1_norm == doctest::Approx(V0.norm()));
  }

  TEST_CASE("power iteration bound and accuracy") {
    Rng rng(11);
    for (int k = 0; k < 10; ++k) {
      const std::size_t p = 4;
      const double h = 0.25;
      const auto inst = oracles::random_instance(rng, p, 3, 6, 0.3);
      const Activation act = Activation::huberized(h);
      const double L = loss(inst.V, inst.data, act).total;
      const OpNormEstimate est = op_norm_estimate(inst.V, inst.data, act, 200, 7);
      CHECK(est.estimate <= 5.0 * p * L * (1.0 + 1e-9));
      const double exact = oracles::exact_operator_norm(oracles::dense_weak_hessian(inst.V, inst.data, h));
      CHECK(est.estimate <= exact * (1.0 + 1e-9));
      CHECK(est.estimate >= 0.99 * exact);
    }
  }

  TEST_CASE("power iteration at V = 0 and bad arguments") {
    Rng rng(12);
    const Dataset D = testing_oracle::unit_dataset(rng, 3, 4);
    const ParamMatrix V(2, 3);
    // Every unit sits at z = 0, inside the band, so the gamma term is live.
    const OpNormEstimate est = op_norm_estimate(V, D, Activation::huberized(0.5), 50, 1);
    CHECK(est.estimate > 0.0);
    CHECK_THROWS_AS(op_norm_estimate(V, D, Activation::huberized(0.5), 0, 1), Error);
    CHECK_THROWS_AS(op_norm_estimate(V, D, Activation::standard_relu(), 10, 1), Error);
  }

  TEST_CASE("judge_theorem1: failed preconditions leave the hypothesis unjudged") {
    std::vector<IterationRecord> recs(2);
    recs[0].loss = 0.5;
    recs[0].param_norm = 1.0;
    recs[1] = recs[0];
    recs[1].t = 1;
    const Theorem1Verdict v = judge_theorem1(recs, 1.0, 1.0, 0.5, 1.0, 4, 2.0, 8);
    CHECK_FALSE(v.preconditions());
    CHECK_FALSE(v.q1_ok);
    int unjudged = 0;
    for (const auto& r : v.rows) unjudged += r.scope == "not-judged";
    CHECK(unjudged == 3);
    const Theorem1Verdict undefined = judge_theorem1(recs, 1e-3, 1e-3, 2.0, 1.0, 4, 2.0, 8);
    CHECK(undefined.rows[1].witness == "Q~1 undefined");
  }

  TEST_CASE("judge_theorem1: a trajectory on the envelope passes") {
    const double L1 = 1e-4, Vn = 1.0;
    const int p = 4;
    const double Q1 = 0.5 * q1_tilde(L1, Vn, p);
    const double Q2 = q2_tilde(Q1, L1, Vn);
    std::vector<IterationRecord> recs;
    for (int t = 1; t <= 20; ++t) {
      IterationRecord r;
      r.t = t;
      r.loss = L1 / (Q2 * (t - 1) + 1.0);
      r.param_norm = Vn;
      const double l = std::log(1.0 / r.loss);
      r.step_size = t < 20 ? Q1 * l * l : 0.0;
      recs.push_back(r);
    }
    const Theorem1Verdict v = judge_theorem1(recs, Q1, Q2, L1, Vn, 4, 2.0, p);
    CHECK(v.preconditions());
    CHECK(v.hypothesis_holds());
    recs[7].loss *= 1.01;
    const Theorem1Verdict bad = judge_theorem1(recs, Q1, Q2, L1, Vn, 4, 2.0, p);
    CHECK_FALSE(bad.i1);
    CHECK(bad.first_violation_t == 8);
  }

  TEST_CASE("judge_theorem1 on a curated descent") {
    const Theorem1Start start = curated_theorem1_start(1);
    CHECK(start.L1 <= 1e-6);
    const TrainResult r = run_theorem1(start, 200);
    const Theorem1Verdict v =
        judge_theorem1(r.records, start.Q1, start.Q2, start.L1, start.V1_norm, start.data.size(), 2.0, 32);
    CHECK(v.preconditions());
    CHECK(v.hypothesis_holds());
    CHECK(hard_passed(v.rows));
  }

  TEST_CASE("alignment monitor") {
    Rng rng(13);
    const Dataset D = testing_oracle::unit_dataset(rng, 3, 8);
    const Activation act = Activation::huberized(0.1);
    const AlignmentReport zero = alignment_monitor(ParamMatrix(2, 3), D, act);
    CHECK_FALSE(zero.alignment.has_value());
    for (int k = 0; k < 20; ++k) {
      const ParamMatrix V = testing_oracle::random_matrix(rng, 2, 3, 0.2);
      const AlignmentReport rep = alignment_monitor(V, D, act);
      CHECK(rep.cauchy_schwarz);
      if (rep.alignment) CHECK(std::abs(*rep.alignment) <= 1.0 + 1e-12);
    }
    Dataset bad = D;
    for (auto& y : bad.labels) y = 1;
    ParamMatrix V(1, 3);
    V(1, 0) = V(1, 1) = V(1, 2) = 10.0;  // negative-sign unit dominates
    for (auto& x : bad.features) x = std::abs(x);
    CHECK_THROWS_AS(alignment_monitor(V, bad, act), Error);
  }

  TEST_CASE("lemma 4 and 12 rows") {
    Rng rng(14);
    const Dataset D = testing_oracle::unit_dataset(rng, 4, 10);
    const ParamMatrix V = testing_oracle::random_matrix(rng, 3, 4, 2.0);
    const Activation act = Activation::huberized(0.3);
    const VerdictRow r4 = lemma4_check(V, D, act);
    CHECK(r4.passed);
    CHECK(r4.scope == "hard");
    const VerdictRow r12 = lemma12_check(V, D, act);
    CHECK(r12.passed);
    CHECK(r12.check == "lemma12.g_le_loss");
  }
}
