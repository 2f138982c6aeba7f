#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hubergd/activation.hpp"
#include "hubergd/data.hpp"
#include "hubergd/dataset.hpp"
#include "hubergd/param_matrix.hpp"
#include "hubergd/trainer.hpp"

namespace hubergd {

/// One line of a verdict report (`check,scope,passed,worst_value,threshold,witness`).
struct VerdictRow {
  std::string check;
  std::string scope;
  bool passed = true;
  double worst_value = 0.0;
  double threshold = 0.0;
  std::string witness;
};

bool all_passed(const std::vector<VerdictRow>& rows) noexcept;

/// Units whose initial preactivation on sample s reaches h + 4 alpha0, split by
/// whether their output sign agrees (plus) or disagrees (minus) with y_s.
struct CaptureSets {
  std::vector<std::vector<std::size_t>> plus;
  std::vector<std::vector<std::size_t>> minus;
};

CaptureSets capture_sets(const ParamMatrix& V0, const Dataset& D, double h, double alpha0);

/// Desk-scale bands standing in for the o(1) terms.
struct ConcentrationTolerances {
  double size_lo = 0.45;  // |I+-s| >= size_lo * p
  double size_hi = 0.55;
  double g0_lo = 0.4;
  double g0_hi = 0.6;
  double additive = 0.05;  // times p
};

struct ConcentrationReport {
  bool applicable = true;  // false when V0 = 0
  std::vector<std::size_t> plus_size, minus_size;
  std::vector<double> g0;
  std::vector<double> capture_gap;                // sum_{I+} v.x - sum_{I-} v.x
  std::array<std::size_t, 4> cluster_all_plus{};  // units in I+s for every s in the cluster
  std::array<std::size_t, 4> cluster_all_minus{};
  std::size_t max_cross_plus = 0;   // max over opposite-label (s, q) of |{i in I+s : v_i.x_q >= 0}|
  std::size_t max_cross_minus = 0;
  std::vector<std::size_t> middle_band;
  double middle_band_bound = 0.0;
  double v1_norm = 0.0;
  double v1_lower = 0.0, v1_upper = 0.0;

  std::vector<VerdictRow> rows;  // one per check, named lemma9.part<k>[...]

  const VerdictRow* row(const std::string& check) const noexcept;
};

/// V0, V1 and D are the working (lifted) quantities; h, alpha0 and sigma come
/// from the config's nominal values and d from config.d.
ConcentrationReport concentration_report(const ParamMatrix& V0, const ParamMatrix& V1,
                                         const Dataset& D, const TrainConfig& config,
                                         const ClusterSpec& spec,
                                         const ConcentrationTolerances& tol = {});

struct OpNormEstimate {
  double estimate = 0.0;     // max_k ||H w_k|| over unit iterates: a lower bound on ||H||_op
  double rayleigh = 0.0;     // |w . H w| at the final iterate
  double residual = 0.0;     // ||H w - (w.Hw) w|| at the final iterate
  double last_change = 0.0;  // relative change of ||H w|| over the final iteration
  int iterations = 0;
};

OpNormEstimate op_norm_estimate(const ParamMatrix& V, const Dataset& D, const Activation& act,
                                int iters, std::uint64_t seed);

struct Theorem1Verdict {
  bool small_loss = false;  // L1 <= n^-(1 + C1)
  bool q1_ok = false;       // Q1 <= Q~1
  bool q2_ok = false;       // Q2 <= Q~2(Q1)
  bool i1 = true, i2 = true, i3 = true;
  std::optional<int> first_violation_t;
  std::string first_violation;
  std::vector<VerdictRow> rows;

  bool preconditions() const noexcept { return small_loss && q1_ok && q2_ok; }
  bool hypothesis_holds() const noexcept { return i1 && i2 && i3; }
};

/// Records must begin at the Theorem-1 starting iterate (label t = 1 there or
/// otherwise; steps are counted from the first record).
Theorem1Verdict judge_theorem1(const std::vector<IterationRecord>& records, double Q1, double Q2,
                               double L1, double V1_norm, std::size_t n, double C1, int p);

struct AlignmentReport {
  std::optional<double> alignment;  // empty when V = 0 or grad = 0
  double grad_norm = 0.0;
  double lemma6_rhs = 0.0;
  bool lower_bound_holds = false;
  bool gated = false;          // L <= n^-(1 + C1): the comparison is a hard assertion
  bool cauchy_schwarz = true;  // ||grad|| >= |grad.V| / ||V||
};

/// Throws Error(domain) when L(V) >= 1.
AlignmentReport alignment_monitor(const ParamMatrix& V, const Dataset& D, const Activation& act,
                                  double C1 = 2.0);

/// ||grad|| <= sqrt(2p) min{L, 1} + slack.
VerdictRow lemma4_check(const ParamMatrix& V, const Dataset& D, const Activation& act,
                        double slack = 1e-12);
/// g_s <= L_ts and e^m/(1+e^m)^2 <= g_s on every sample.
VerdictRow lemma12_check(const ParamMatrix& V, const Dataset& D, const Activation& act);

}  // namespace hubergd
