#pragma once

namespace hubergd {

enum class StepPolicy {
  theorem1,  // alpha_t = Q1 ln^2(1/L_t)
  log_squared,  // alpha_t = C5 ln^2(1/L_t) / p
  fixed,     // alpha_t = fixed_alpha
};

struct ScheduleState {
  StepPolicy policy = StepPolicy::log_squared;
  double q1 = 1.0;
  double q2 = 1.0;
  double alpha0 = 1.0;
  double fixed_alpha = 0.1;
  double c5 = 1.0;
  bool strict = false;
  // Cap applied in lenient mode when L_t >= 1; <= 0 means 1/p.
  double alpha_max = 0.0;

  // Throws Error(invalid_parameter) unless q1, q2, alpha0 (and fixed_alpha,
  // c5 where used) are positive.
  void validate() const;
};

struct StepDecision {
  double alpha = 0.0;
  bool capped = false;  // lenient mode hit L_t >= 1
};

/// min{ 1/(30 p L1 ln^2(1/L1)), 108 ||V1||^2 / (125 L1 ln^4(1/L1)), e^2/(120 p) }
double q1_tilde(double L1, double V1_norm, int p);
/// 125 Q1 L1 ln^4(1/L1) / (216 ||V1||^2)
double q2_tilde(double Q1, double L1, double V1_norm);

StepDecision next_step_size(const ScheduleState& state, double L_t, int p);

}  // namespace hubergd
