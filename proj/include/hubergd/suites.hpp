#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hubergd/data.hpp"
#include "hubergd/dataset.hpp"
#include "hubergd/param_matrix.hpp"
#include "hubergd/trainer.hpp"
#include "hubergd/verify.hpp"

namespace hubergd {

/// Rows with scope "hard" decide the exit code; "statistical", "conditional",
/// "precondition" and "monitor" rows are reported only.
bool hard_passed(const std::vector<VerdictRow>& rows) noexcept;

struct SuiteResult {
  std::string name;
  std::size_t instances = 0;
  double runtime_s = 0.0;
  std::vector<VerdictRow> rows;

  bool passed() const noexcept { return hard_passed(rows); }
};

/// Accumulates the per-example g <= L check over every instance a suite touches.
class Lemma12Tally {
 public:
  void observe(const ParamMatrix& V, const Dataset& D, const Activation& act);
  VerdictRow row() const;

 private:
  std::size_t instances_ = 0;
  std::size_t violations_ = 0;
  double worst_ = -1.0;
  std::string witness_;
};

// Instance counts are the defaults; every suite is deterministic in `seed`.
SuiteResult grad_suite(std::uint64_t seed, int instances = 100);
SuiteResult hvp_suite(std::uint64_t seed, int instances = 50);
SuiteResult lemma4_suite(std::uint64_t seed, int instances = 1000);
SuiteResult lemma3_suite(std::uint64_t seed, int instances = 200);
/// Cluster inner-product bounds on lifted generated data, over `datasets` seeds.
SuiteResult lemma13_suite(std::uint64_t seed, int datasets = 10);

struct ConcentrationSetup {
  int p = 1 << 14;
  std::size_t d = 10;
  std::size_t n = 128;
  double r = 0.05, delta = 0.05, epsilon = 0.05;
  double beta = 0.25;
  int seeds = 10;
  int required = 9;
};

/// Lemma 9 parts 1-7 on one initialization per seed; a seed is good when
/// every part passes. Data is fixed by `seed`, initializations are derived.
SuiteResult concentration_suite(std::uint64_t seed, const ConcentrationSetup& setup = {});

/// Explicit-bias vs lifted training on the XOR mixture.
SuiteResult equivalence_suite(std::uint64_t seed, int T = 100, double tolerance = 1e-8);

/// scope in {grad, hvp, lemmas, concentration, equivalence, all}.
std::vector<SuiteResult> run_check_scope(const std::string& scope, std::uint64_t seed);

struct Theorem1Start {
  ParamMatrix V;
  Dataset data;  // lifted
  double L1 = 0.0;
  double V1_norm = 0.0;
  double Q1 = 0.0;
  double Q2 = 0.0;
  int scalings = 0;
};

/// n random unit points in dimension d, lifted; weights resampled until every
/// margin is positive, then scaled by 1.1 until L <= target_loss.
Theorem1Start curated_theorem1_start(std::uint64_t seed, int p = 32, std::size_t d = 3,
                                     std::size_t n = 4, double target_loss = 1e-6);

/// Theorem-1 policy descent from a curated start; records are labelled from t = 1.
TrainResult run_theorem1(const Theorem1Start& start, int T, double c1 = 2.0, double lemma5_slack = 1e-9);

}  // namespace hubergd
