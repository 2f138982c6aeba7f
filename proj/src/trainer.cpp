#include "hubergd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hubergd/data.hpp"
#include "hubergd/error.hpp"
#include "hubergd/model.hpp"
#include "hubergd/rng.hpp"

namespace hubergd {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "1";
    case Verdict::fail: return "0";
    case Verdict::na: return "na";
  }
  return "na";
}

bool InvariantFlags::any_failed() const noexcept {
  // lemma6 is a monitor: its gate constant is a free parameter.
  for (Verdict v : {i1, i2, i3, lemma4, lemma5, lemma12}) {
    if (v == Verdict::fail) return true;
  }
  return false;
}

namespace {

Verdict verdict(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double TrainConfig::resolved_sigma() const {
  return sigma.value_or(std::pow(static_cast<double>(p), -(0.5 + beta / 2.0)));
}

double TrainConfig::resolved_alpha0() const {
  return alpha0.value_or(std::pow(static_cast<double>(p), -(0.5 + beta)));
}

double TrainConfig::resolved_h() const { return h.value_or(1.0 / static_cast<double>(p)); }

Activation TrainConfig::resolved_activation() const {
  if (activation == Activation::Kind::standard_relu) return Activation::standard_relu();
  return Activation::huberized(resolved_h());
}

ScheduleState TrainConfig::resolved_schedule() const {
  ScheduleState s = schedule;
  s.alpha0 = resolved_alpha0();
  return s;
}

void TrainConfig::validate() const {
  if (p < 1) throw Error(ErrorKind::invalid_parameter, "p must be >= 1");
  if (d < 1) throw Error(ErrorKind::invalid_parameter, "d must be >= 1");
  if (T < 0) throw Error(ErrorKind::invalid_parameter, "T must be >= 0");
  if (!(resolved_sigma() >= 0.0) || !std::isfinite(resolved_sigma())) {
    throw Error(ErrorKind::invalid_parameter, "sigma must be finite and >= 0");
  }
  resolved_activation();
  resolved_schedule().validate();
}

WorkingProblem make_working_problem(const TrainConfig& config, const Dataset& raw) {
  raw.check_well_formed();
  if (raw.dim != config.d) {
    throw Error(ErrorKind::shape, "dataset dimension " + std::to_string(raw.dim) +
                                      " does not match config d = " + std::to_string(config.d));
  }
  WorkingProblem wp;
  if (config.with_bias) {
    wp.data = append_constant(raw, 1.0, 1.0);
    wp.sigma = config.resolved_sigma();
    wp.step_scale = 1.0;
  } else {
    wp.data = append_constant(raw, 1.0 / std::sqrt(2.0), 1.0);
    wp.data.lifted = true;
    wp.sigma = std::sqrt(2.0) * config.resolved_sigma();
    wp.step_scale = 2.0;
  }
  return wp;
}

ParamMatrix initialize(const TrainConfig& config) {
  const double sigma = config.resolved_sigma();
  const double lift = config.with_bias ? 1.0 : std::sqrt(2.0);
  ParamMatrix V(static_cast<std::size_t>(config.p), config.d + 1);
  Rng rng(config.seed);
  for (double& v : V.values()) v = lift * (sigma * rng.normal());
  return V;
}

bool TrainResult::any_failed() const noexcept {
  return std::any_of(records.begin(), records.end(),
                     [](const IterationRecord& r) { return r.flags.any_failed(); });
}

TrainResult descend(ParamMatrix start, const Dataset& working, const DescentOptions& opt) {
  working.check_well_formed();
  TrainResult result;
  result.initial = start;
  ParamMatrix V = std::move(start);
  const double p = static_cast<double>(opt.p);
  const double n = static_cast<double>(working.size());
  const bool unit_ball = working.max_feature_norm() <= 1.0 + 1e-12;
  const double lemma6_gate = std::pow(n, -(1.0 + opt.c1));
  std::vector<double> grad_sq;

  for (int k = 0; k <= opt.T; ++k) {
    const Evaluation e = evaluate(V, working, opt.activation);
    IterationRecord rec;
    rec.t = opt.first_t + k;
    rec.loss = e.loss.total;
    rec.grad_norm = e.gradient.norm();
    rec.param_norm = V.norm();
    const double gdotv = dot(e.gradient, V);
    rec.alignment = (rec.grad_norm > 0.0 && rec.param_norm > 0.0)
                        ? -gdotv / (rec.grad_norm * rec.param_norm)
                        : kNaN;
    const double lg = std::log(1.0 / rec.loss);
    rec.ratio = rec.param_norm > 0.0 ? lg * lg / rec.param_norm : kNaN;

    if (!std::isfinite(rec.loss) || !e.gradient.all_finite()) {
      result.abort_reason = "non-finite loss or gradient at t = " + std::to_string(rec.t);
      result.records.push_back(rec);
      break;
    }

    bool l12 = true;
    for (std::size_t s = 0; s < working.size(); ++s) {
      const double g = e.loss.g[s];
      const double curv = g * sigmoid(e.loss.margins[s]);
      if (!(g <= e.loss.per_example[s]) || !(curv <= g)) l12 = false;
    }
    rec.flags.lemma12 = verdict(l12);
    if (unit_ball) {
      rec.flags.lemma4 = verdict(rec.grad_norm <= std::sqrt(2.0 * p) * std::min(rec.loss, 1.0) + 1e-12);
    }
    if (rec.loss < 1.0 && rec.param_norm > 0.0 && rec.loss <= lemma6_gate) {
      const double rhs = 5.0 * rec.loss * lg / (6.0 * rec.param_norm);
      rec.flags.lemma6 = verdict(rec.grad_norm >= rhs);
    }

    if (k < opt.T) {
      double alpha = 0.0;
      if (k == 0 && opt.initial_step) {
        alpha = opt.schedule.alpha0;
      } else {
        const StepDecision sd = next_step_size(opt.schedule, rec.loss, opt.p);
        alpha = sd.alpha;
        rec.step_capped = sd.capped;
      }
      rec.step_size = opt.step_scale * alpha;
      V.axpy(-rec.step_size, e.gradient);
      if (k == 0) result.after_first = V;
    }
    grad_sq.push_back(rec.grad_norm * rec.grad_norm);
    result.records.push_back(rec);
  }

  // Verdicts that need the following record or a reference record.
  auto& recs = result.records;
  const bool scheduled_theorem1 = opt.schedule.policy == StepPolicy::theorem1;
  const std::size_t ref = opt.initial_step ? 1 : 0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    IterationRecord& r = recs[k];
    const bool has_step = k + 1 < recs.size() && r.step_size > 0.0;
    const bool scheduled_step = has_step && !(k == 0 && opt.initial_step);
    if (scheduled_step && scheduled_theorem1) r.flags.i2 = verdict(r.step_size * r.loss <= 1.0 / (30.0 * p));
    if (has_step && unit_ball && opt.activation.is_huberized() &&
        r.step_size * r.loss <= 1.0 / (30.0 * p)) {
      const double bound = r.loss - 5.0 / 6.0 * r.step_size * grad_sq[k] + opt.lemma5_slack * r.loss;
      r.flags.lemma5 = verdict(recs[k + 1].loss <= bound);
    }
    if (scheduled_theorem1 && k >= ref && ref < recs.size()) {
      const IterationRecord& base = recs[ref];
      const double steps = static_cast<double>(r.t - base.t);
      r.flags.i1 = verdict(r.loss <= base.loss / (opt.schedule.q2 * steps + 1.0) * (1.0 + 1e-12));
      if (std::isfinite(base.ratio) && std::isfinite(r.ratio)) {
        r.flags.i3 = verdict(r.ratio >= base.ratio * (1.0 - 1e-12));
      }
    }
  }
  result.final = std::move(V);
  return result;
}

TrainResult train(const TrainConfig& config, const Dataset& raw) {
  config.validate();
  const WorkingProblem wp = make_working_problem(config, raw);
  DescentOptions opt;
  opt.activation = config.resolved_activation();
  opt.schedule = config.resolved_schedule();
  opt.p = config.p;
  opt.T = config.T;
  opt.first_t = 0;
  opt.initial_step = config.schedule.policy != StepPolicy::fixed;
  opt.step_scale = wp.step_scale;
  opt.c1 = config.c1;
  opt.lemma5_slack = config.lemma5_slack;
  return descend(initialize(config), wp.data, opt);
}

EquivalenceReport train_equivalence_check(const TrainConfig& config, const Dataset& raw) {
  TrainConfig biased = config;
  biased.with_bias = true;
  TrainConfig lifted = config;
  lifted.with_bias = false;
  const TrainResult a = train(biased, raw);
  const TrainResult b = train(lifted, raw);
  if (a.abort_reason) throw Error(ErrorKind::domain, "explicit-bias run aborted: " + *a.abort_reason);
  if (b.abort_reason) throw Error(ErrorKind::domain, "lifted run aborted: " + *b.abort_reason);
  EquivalenceReport rep;
  rep.iterations = static_cast<int>(std::min(a.records.size(), b.records.size()));
  for (int k = 0; k < rep.iterations; ++k) {
    const double La = a.records[k].loss;
    const double Lb = b.records[k].loss;
    const double disc = std::abs(Lb - La) / std::max(La, 1e-300);
    if (disc > rep.max_discrepancy) {
      rep.max_discrepancy = disc;
      rep.worst_t = a.records[k].t;
    }
  }
  return rep;
}

}  // namespace hubergd
