#include "hubergd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hubergd/error.hpp"

namespace hubergd {

namespace {

void require_small_loss(double L1) {
  if (!(L1 > 0.0) || !(L1 < 1.0)) {
    throw Error(ErrorKind::domain, "schedule constants need 0 < L1 < 1, got " + std::to_string(L1));
  }
}

}  // namespace

void ScheduleState::validate() const {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(alpha0)) throw Error(ErrorKind::invalid_parameter, "alpha0 must be positive");
  if (policy == StepPolicy::theorem1 && (!positive(q1) || !positive(q2))) {
    throw Error(ErrorKind::invalid_parameter, "Q1 and Q2 must be positive");
  }
  if (policy == StepPolicy::fixed && !positive(fixed_alpha)) {
    throw Error(ErrorKind::invalid_parameter, "fixed step size must be positive");
  }
  if (policy == StepPolicy::log_squared && !positive(c5)) {
    throw Error(ErrorKind::invalid_parameter, "C5 must be positive");
  }
}

double q1_tilde(double L1, double V1_norm, int p) {
  require_small_loss(L1);
  if (!(V1_norm > 0.0)) throw Error(ErrorKind::invalid_parameter, "||V1|| must be positive");
  if (p < 1) throw Error(ErrorKind::invalid_parameter, "p must be >= 1");
  const double l = std::log(1.0 / L1);
  const double l2 = l * l;
  const double pd = static_cast<double>(p);
  const double e2 = std::numbers::e * std::numbers::e;
  const double t1 = 1.0 / (30.0 * pd * L1 * l2);
  const double t2 = 108.0 * V1_norm * V1_norm / (125.0 * L1 * l2 * l2);
  const double t3 = e2 / (120.0 * pd);
  return std::min({t1, t2, t3});
}

double q2_tilde(double Q1, double L1, double V1_norm) {
  require_small_loss(L1);
  if (!(Q1 > 0.0) || !(V1_norm > 0.0)) {
    throw Error(ErrorKind::invalid_parameter, "Q1 and ||V1|| must be positive");
  }
  const double l = std::log(1.0 / L1);
  return 125.0 * Q1 * L1 * l * l * l * l / (216.0 * V1_norm * V1_norm);
}

StepDecision next_step_size(const ScheduleState& state, double L_t, int p) {
  if (!(L_t > 0.0)) throw Error(ErrorKind::domain, "step size needs L_t > 0");
  if (p < 1) throw Error(ErrorKind::invalid_parameter, "p must be >= 1");
  const double l = std::log(1.0 / L_t);
  double alpha = 0.0;
  switch (state.policy) {
    case StepPolicy::theorem1: alpha = state.q1 * l * l; break;
    case StepPolicy::log_squared: alpha = state.c5 * l * l / static_cast<double>(p); break;
    case StepPolicy::fixed: return {state.fixed_alpha, false};
  }
  if (L_t >= 1.0) {
    if (state.strict) {
      throw Error(ErrorKind::domain,
                  "loss-dependent step size undefined for L_t = " + std::to_string(L_t) + " >= 1");
    }
    const double cap = state.alpha_max > 0.0 ? state.alpha_max : 1.0 / static_cast<double>(p);
    return {std::min(alpha, cap), true};
  }
  return {alpha, false};
}

}  // namespace hubergd
