#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hubergd/activation.hpp"
#include "hubergd/dataset.hpp"
#include "hubergd/param_matrix.hpp"
#include "hubergd/schedule.hpp"

namespace hubergd {

enum class Verdict { na, pass, fail };
const char* to_string(Verdict v);  // "na", "1", "0"

struct InvariantFlags {
  Verdict i1 = Verdict::na;      // L_t <= L_ref / (Q2 (t - t_ref) + 1)
  Verdict i2 = Verdict::na;      // alpha_t L_t <= 1/(30p)
  Verdict i3 = Verdict::na;      // ln^2(1/L_t)/||V_t|| >= its reference value
  Verdict lemma4 = Verdict::na;  // ||grad|| <= sqrt(2p) min(L, 1)
  Verdict lemma5 = Verdict::na;  // descent inequality when alpha_t L_t <= 1/(30p)
  Verdict lemma6 = Verdict::na;  // gradient lower bound, gated on L_t <= n^-(1+C1)
  Verdict lemma12 = Verdict::na; // g_s <= L_ts and g_s(1-g_s) <= g_s for every s

  bool any_failed() const noexcept;
};

struct IterationRecord {
  int t = 0;
  double loss = 0.0;
  double grad_norm = 0.0;
  double param_norm = 0.0;
  double step_size = 0.0;  // step applied to the working parametrization; 0 on the last record
  double alignment = 0.0;  // -grad.V / (||grad|| ||V||); NaN when undefined
  double ratio = 0.0;      // ln^2(1/L_t) / ||V_t||; NaN when V = 0
  bool step_capped = false;
  InvariantFlags flags;
};

struct TrainConfig {
  int p = 100;
  std::size_t d = 2;
  double beta = 0.25;
  std::optional<double> sigma;   // default p^-(1/2 + beta/2)
  std::optional<double> alpha0;  // default p^-(1/2 + beta)
  std::optional<double> h;       // default 1/p
  Activation::Kind activation = Activation::Kind::huberized;
  ScheduleState schedule;
  int T = 100;
  std::uint64_t seed = 1;
  // Train explicit biases on (x, 1) instead of the lifted bias-free form.
  bool with_bias = false;
  double c1 = 2.0;
  // Slack for the Lemma 5 descent check, relative to L_t.
  double lemma5_slack = 1e-9;

  double resolved_sigma() const;
  double resolved_alpha0() const;
  double resolved_h() const;
  Activation resolved_activation() const;
  ScheduleState resolved_schedule() const;
  void validate() const;
};

/// The problem gradient descent actually runs on. With explicit biases the
/// rows are (x, 1); otherwise (x/sqrt2, 1/sqrt2) with init deviation
/// sqrt2 sigma and every step doubled.
struct WorkingProblem {
  Dataset data;
  double sigma = 0.0;
  double step_scale = 1.0;
};

WorkingProblem make_working_problem(const TrainConfig& config, const Dataset& raw);

/// i.i.d. N(0, sigma_work^2) entries in dimension d + 1. Draws are coupled
/// across with_bias on/off: the lifted matrix is exactly sqrt2 times the
/// explicit-bias one.
ParamMatrix initialize(const TrainConfig& config);

struct DescentOptions {
  Activation activation = Activation::huberized(1.0);
  ScheduleState schedule;
  int p = 1;
  int T = 0;                 // number of updates
  int first_t = 0;           // label of the first record
  bool initial_step = true;  // first update uses schedule.alpha0
  double step_scale = 1.0;
  double c1 = 2.0;
  double lemma5_slack = 1e-9;
};

struct TrainResult {
  ParamMatrix initial;
  ParamMatrix final;
  std::vector<IterationRecord> records;  // T + 1 entries unless aborted
  std::optional<std::string> abort_reason;

  // The weights after the first update (V^(1)), when one happened.
  std::optional<ParamMatrix> after_first;

  bool any_failed() const noexcept;
};

/// Full-batch gradient descent from `start` on an already-prepared dataset.
TrainResult descend(ParamMatrix start, const Dataset& working, const DescentOptions& options);

/// initialize + the distinguished iteration-0 step + T - 1 scheduled steps.
/// The fixed policy uses its own step from the start.
TrainResult train(const TrainConfig& config, const Dataset& raw);

struct EquivalenceReport {
  double max_discrepancy = 0.0;
  int worst_t = 0;
  int iterations = 0;
};

/// Runs the explicit-bias and lifted trainers from coupled draws and reports
/// max_t |L~_t - L_t| / max(L_t, 1e-300).
EquivalenceReport train_equivalence_check(const TrainConfig& config, const Dataset& raw);

}  // namespace hubergd
