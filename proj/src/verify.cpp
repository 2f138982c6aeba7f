#include "hubergd/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "hubergd/error.hpp"
#include "hubergd/model.hpp"
#include "hubergd/rng.hpp"
#include "hubergd/schedule.hpp"

namespace hubergd {

bool all_passed(const std::vector<VerdictRow>& rows) noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const VerdictRow& r) { return r.passed; });
}

const VerdictRow* ConcentrationReport::row(const std::string& check) const noexcept {
  for (const auto& r : rows) {
    if (r.check == check) return &r;
  }
  return nullptr;
}

namespace {

using Bits = std::vector<std::uint64_t>;

void set_bit(Bits& b, std::size_t i) { b[i / 64] |= std::uint64_t{1} << (i % 64); }

std::size_t and_count(const Bits& a, const Bits& b) {
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.size(); ++k) c += static_cast<std::size_t>(std::popcount(a[k] & b[k]));
  return c;
}

std::vector<double> preactivation_table(const ParamMatrix& V, const Dataset& D) {
  std::vector<double> Z(V.rows() * D.size());
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < V.rows(); ++i) {
    for (std::size_t s = 0; s < D.size(); ++s) Z[i * D.size() + s] = dot(V.row(i), D.feature(s));
  }
  return Z;
}

}  // namespace

CaptureSets capture_sets(const ParamMatrix& V0, const Dataset& D, double h, double alpha0) {
  if (V0.dim() != D.dim) throw Error(ErrorKind::shape, "weight and feature dimensions differ");
  const double threshold = h + 4.0 * alpha0;
  CaptureSets cs;
  cs.plus.resize(D.size());
  cs.minus.resize(D.size());
  for (std::size_t s = 0; s < D.size(); ++s) {
    const auto x = D.feature(s);
    for (std::size_t i = 0; i < V0.rows(); ++i) {
      if (!(dot(V0.row(i), x) >= threshold)) continue;
      if (V0.output_sign(i) == D.labels[s]) {
        cs.plus[s].push_back(i);
      } else {
        cs.minus[s].push_back(i);
      }
    }
  }
  return cs;
}

ConcentrationReport concentration_report(const ParamMatrix& V0, const ParamMatrix& V1,
                                         const Dataset& D, const TrainConfig& config,
                                         const ClusterSpec& spec,
                                         const ConcentrationTolerances& tol) {
  if (!D.has_clusters()) throw Error(ErrorKind::invalid_input, "concentration report needs cluster memberships");
  if (V0.dim() != D.dim || !V0.same_shape(V1)) throw Error(ErrorKind::shape, "shape mismatch");
  const std::size_t n = D.size();
  const std::size_t rows = V0.rows();
  const double p = static_cast<double>(V0.half_width());
  const double h = config.resolved_h();
  const double alpha0 = config.resolved_alpha0();
  const double sigma = config.resolved_sigma();
  const double r = spec.radius;
  const double delta = spec.separation;
  const double threshold = h + 4.0 * alpha0;
  const Activation act = config.resolved_activation();

  ConcentrationReport rep;
  rep.applicable = V0.max_abs() > 0.0;
  const auto Z = preactivation_table(V0, D);
  const std::size_t words = (rows + 63) / 64;
  std::vector<Bits> plus(n, Bits(words, 0)), minus(n, Bits(words, 0)), nonneg(n, Bits(words, 0));
  rep.plus_size.assign(n, 0);
  rep.minus_size.assign(n, 0);
  rep.capture_gap.assign(n, 0.0);
  rep.middle_band.assign(n, 0);
  const double band_lo = -alpha0 * (0.5 + 2.0 * (delta + r));
  for (std::size_t s = 0; s < n; ++s) {
    double sum_plus = 0.0, sum_minus = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double z = Z[i * n + s];
      const bool agrees = V0.output_sign(i) == D.labels[s];
      if (z >= 0.0) set_bit(nonneg[s], i);
      if (z >= threshold) {
        if (agrees) {
          set_bit(plus[s], i);
          ++rep.plus_size[s];
          sum_plus += z;
        } else {
          set_bit(minus[s], i);
          ++rep.minus_size[s];
          sum_minus += z;
        }
      }
      if (!agrees && z >= band_lo && z <= threshold) ++rep.middle_band[s];
    }
    rep.capture_gap[s] = sum_plus - sum_minus;
  }
  rep.g0 = loss(V0, D, act).g;

  for (int k = 1; k <= 4; ++k) {
    Bits all_p(words, ~std::uint64_t{0}), all_m(words, ~std::uint64_t{0});
    bool any = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (D.cluster_of[s] != k) continue;
      any = true;
      for (std::size_t w = 0; w < words; ++w) {
        all_p[w] &= plus[s][w];
        all_m[w] &= minus[s][w];
      }
    }
    if (!any) continue;
    Bits ones(words, ~std::uint64_t{0});
    rep.cluster_all_plus[k - 1] = and_count(all_p, ones);
    rep.cluster_all_minus[k - 1] = and_count(all_m, ones);
  }

  std::string cross_plus_witness, cross_minus_witness;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t q = 0; q < n; ++q) {
      if (D.labels[s] == D.labels[q]) continue;
      const std::size_t cp = and_count(plus[s], nonneg[q]);
      const std::size_t cm = and_count(minus[s], nonneg[q]);
      if (cp > rep.max_cross_plus || cross_plus_witness.empty()) {
        if (cp >= rep.max_cross_plus) {
          rep.max_cross_plus = cp;
          cross_plus_witness = "(" + std::to_string(s) + ", " + std::to_string(q) + ")";
        }
      }
      if (cm > rep.max_cross_minus || cross_minus_witness.empty()) {
        if (cm >= rep.max_cross_minus) {
          rep.max_cross_minus = cm;
          cross_minus_witness = "(" + std::to_string(s) + ", " + std::to_string(q) + ")";
        }
      }
    }
  }

  rep.middle_band_bound =
      std::sqrt(2.0) / (sigma * std::sqrt(std::numbers::pi)) * (h + 5.0 * alpha0 * (2.0 + delta + r)) * p;
  rep.v1_norm = V1.norm();
  const double d = static_cast<double>(config.d);
  rep.v1_lower = 0.6 * std::sqrt(d / std::pow(p, config.beta));
  rep.v1_upper = 3.0 * std::sqrt(d / std::pow(p, config.beta));

  const std::string scope = rep.applicable ? "statistical" : "inapplicable";
  const double add = tol.additive * p;
  const auto sample = [](std::size_t s) { return "sample " + std::to_string(s); };

  {
    VerdictRow row{"lemma9.part1.capture_sum", scope, true, 0.0, -2.0 - add, ""};
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n; ++s) {
      if (rep.capture_gap[s] < worst) {
        worst = rep.capture_gap[s];
        row.witness = sample(s);
      }
    }
    row.worst_value = worst;
    row.passed = worst >= row.threshold;
    rep.rows.push_back(row);
  }
  {
    VerdictRow lo{"lemma9.part2.size_lower", scope, true, 0.0, tol.size_lo * p, ""};
    VerdictRow hi{"lemma9.part2.size_upper", scope, true, 0.0, tol.size_hi * p, ""};
    double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t sz : {rep.plus_size[s], rep.minus_size[s]}) {
        const double v = static_cast<double>(sz);
        if (v < mn) {
          mn = v;
          lo.witness = sample(s);
        }
        if (v > mx) {
          mx = v;
          hi.witness = sample(s);
        }
      }
    }
    lo.worst_value = mn;
    lo.passed = mn >= lo.threshold;
    hi.worst_value = mx;
    hi.passed = mx <= hi.threshold;
    rep.rows.push_back(lo);
    rep.rows.push_back(hi);
  }
  {
    VerdictRow lo{"lemma9.part3.g0_lower", scope, true, 0.0, tol.g0_lo, ""};
    VerdictRow hi{"lemma9.part3.g0_upper", scope, true, 0.0, tol.g0_hi, ""};
    double mn = 1.0, mx = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (rep.g0[s] < mn) {
        mn = rep.g0[s];
        lo.witness = sample(s);
      }
      if (rep.g0[s] > mx) {
        mx = rep.g0[s];
        hi.witness = sample(s);
      }
    }
    lo.worst_value = mn;
    lo.passed = mn >= lo.threshold;
    hi.worst_value = mx;
    hi.passed = mx <= hi.threshold;
    rep.rows.push_back(lo);
    rep.rows.push_back(hi);
  }
  {
    VerdictRow row{"lemma9.part4.cluster_capture", scope, true, 0.0,
                   ((1.0 - std::sqrt(r)) / 2.0 - tol.additive) * p, ""};
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 4; ++k) {
      for (int side = 0; side < 2; ++side) {
        const double v = static_cast<double>(side == 0 ? rep.cluster_all_plus[k] : rep.cluster_all_minus[k]);
        if (v < mn) {
          mn = v;
          row.witness = "cluster " + std::to_string(k + 1) + (side == 0 ? " I+" : " I-");
        }
      }
    }
    row.worst_value = mn;
    row.passed = mn >= row.threshold;
    rep.rows.push_back(row);
  }
  {
    VerdictRow row{"lemma9.part5.cross_capture", scope, true, 0.0,
                   (1.0 / 3.0 + delta / 4.0 + r + tol.additive) * p, ""};
    const bool plus_worse = rep.max_cross_plus >= rep.max_cross_minus;
    row.worst_value = static_cast<double>(std::max(rep.max_cross_plus, rep.max_cross_minus));
    row.witness = (plus_worse ? "I+ pair " + cross_plus_witness : "I- pair " + cross_minus_witness);
    row.passed = row.worst_value <= row.threshold;
    rep.rows.push_back(row);
  }
  {
    VerdictRow row{"lemma9.part6.middle_band", scope, true, 0.0, rep.middle_band_bound + add, ""};
    std::size_t mx = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (rep.middle_band[s] >= mx) {
        mx = rep.middle_band[s];
        row.witness = sample(s);
      }
    }
    row.worst_value = static_cast<double>(mx);
    row.passed = row.worst_value <= row.threshold;
    rep.rows.push_back(row);
  }
  {
    VerdictRow lo{"lemma9.part7.v1_norm_lower", scope, rep.v1_norm >= rep.v1_lower, rep.v1_norm,
                  rep.v1_lower, ""};
    VerdictRow hi{"lemma9.part7.v1_norm_upper", scope, rep.v1_norm <= rep.v1_upper, rep.v1_norm,
                  rep.v1_upper, ""};
    rep.rows.push_back(lo);
    rep.rows.push_back(hi);
  }
  return rep;
}

OpNormEstimate op_norm_estimate(const ParamMatrix& V, const Dataset& D, const Activation& act,
                                int iters, std::uint64_t seed) {
  if (iters <= 0) throw Error(ErrorKind::invalid_input, "power iteration needs iters > 0");
  if (!act.is_huberized()) throw Error(ErrorKind::unsupported, "operator norm needs the Huberized ReLU");
  Rng rng(seed);
  ParamMatrix w(V.half_width(), V.dim());
  for (double& v : w.values()) v = rng.normal();
  w *= 1.0 / w.norm();

  OpNormEstimate out;
  double prev = 0.0;
  ParamMatrix Hw;
  for (int k = 0; k < iters; ++k) {
    Hw = hvp(V, D, w, act);
    const double norm = Hw.norm();
    out.iterations = k + 1;
    out.estimate = std::max(out.estimate, norm);
    out.last_change = prev > 0.0 ? std::abs(norm - prev) / prev : 1.0;
    prev = norm;
    if (norm == 0.0) break;
    w = Hw;
    w *= 1.0 / norm;
  }
  Hw = hvp(V, D, w, act);
  const double rq = dot(w, Hw);
  out.rayleigh = std::abs(rq);
  ParamMatrix res = Hw;
  res.axpy(-rq, w);
  out.residual = res.norm();
  out.estimate = std::max(out.estimate, Hw.norm());
  return out;
}

Theorem1Verdict judge_theorem1(const std::vector<IterationRecord>& records, double Q1, double Q2,
                               double L1, double V1_norm, std::size_t n, double C1, int p) {
  Theorem1Verdict v;
  const double gate = std::pow(static_cast<double>(n), -(1.0 + C1));
  v.small_loss = L1 <= gate;
  v.rows.push_back({"theorem1.small_loss", "precondition", v.small_loss, L1, gate, ""});
  bool constants_defined = L1 > 0.0 && L1 < 1.0 && V1_norm > 0.0 && p >= 1;
  double q1t = 0.0, q2t = 0.0;
  if (constants_defined) {
    q1t = q1_tilde(L1, V1_norm, p);
    q2t = q2_tilde(Q1, L1, V1_norm);
  }
  v.q1_ok = constants_defined && Q1 > 0.0 && Q1 <= q1t;
  v.q2_ok = constants_defined && Q2 > 0.0 && Q2 <= q2t * (1.0 + 1e-12);
  v.rows.push_back({"theorem1.q1", "precondition", v.q1_ok, Q1, q1t, constants_defined ? "" : "Q~1 undefined"});
  v.rows.push_back({"theorem1.q2", "precondition", v.q2_ok, Q2, q2t, constants_defined ? "" : "Q~2 undefined"});
  if (!v.q1_ok || !v.q2_ok || records.empty()) {
    for (const char* name : {"theorem1.I1", "theorem1.I2", "theorem1.I3"}) {
      v.rows.push_back({name, "not-judged", true, 0.0, 0.0, "preconditions fail"});
    }
    return v;
  }
  // Lemma 6 (and so the envelope) is only promised below the small-loss gate.
  const std::string scope = v.small_loss ? "hard" : "conditional";
  const int t0 = records.front().t;
  const double l1 = std::log(1.0 / L1);
  const double ratio1 = l1 * l1 / V1_norm;
  const double pd = static_cast<double>(p);
  VerdictRow r1{"theorem1.I1", scope, true, -std::numeric_limits<double>::infinity(), 1.0, ""};
  VerdictRow r2{"theorem1.I2", scope, true, 0.0, 1.0 / (30.0 * pd), ""};
  VerdictRow r3{"theorem1.I3", scope, true, std::numeric_limits<double>::infinity(), ratio1, ""};
  auto note = [&](int t, const char* which) {
    if (!v.first_violation_t) {
      v.first_violation_t = t;
      v.first_violation = which;
    }
  };
  for (std::size_t k = 0; k < records.size(); ++k) {
    const IterationRecord& rec = records[k];
    const double envelope = L1 / (Q2 * static_cast<double>(rec.t - t0) + 1.0);
    // Reported as L_t / envelope; must stay <= 1.
    const double rel = rec.loss / envelope;
    if (rel > r1.worst_value) {
      r1.worst_value = rel;
      r1.witness = "t = " + std::to_string(rec.t);
    }
    if (!(rec.loss <= envelope * (1.0 + 1e-12))) {
      v.i1 = false;
      note(rec.t, "I1");
    }
    if (rec.step_size > 0.0) {
      const double prod = rec.step_size * rec.loss;
      if (prod > r2.worst_value) {
        r2.worst_value = prod;
        r2.witness = "t = " + std::to_string(rec.t);
      }
      if (!(prod <= r2.threshold)) {
        v.i2 = false;
        note(rec.t, "I2");
      }
    }
    const double lt = std::log(1.0 / rec.loss);
    const double ratio = lt * lt / rec.param_norm;
    if (ratio < r3.worst_value) {
      r3.worst_value = ratio;
      r3.witness = "t = " + std::to_string(rec.t);
    }
    if (!(ratio >= ratio1 * (1.0 - 1e-12))) {
      v.i3 = false;
      note(rec.t, "I3");
    }
  }
  r1.passed = v.i1;
  r2.passed = v.i2;
  r3.passed = v.i3;
  v.rows.push_back(r1);
  v.rows.push_back(r2);
  v.rows.push_back(r3);
  return v;
}

AlignmentReport alignment_monitor(const ParamMatrix& V, const Dataset& D, const Activation& act,
                                  double C1) {
  const Evaluation e = evaluate(V, D, act);
  const double L = e.loss.total;
  if (!(L < 1.0)) throw Error(ErrorKind::domain, "alignment monitor needs L(V) < 1");
  AlignmentReport rep;
  rep.grad_norm = e.gradient.norm();
  const double vn = V.norm();
  const double gv = dot(e.gradient, V);
  if (vn > 0.0) {
    rep.cauchy_schwarz = rep.grad_norm * (1.0 + 1e-12) >= std::abs(gv) / vn;
    if (rep.grad_norm > 0.0) rep.alignment = -gv / (rep.grad_norm * vn);
    rep.lemma6_rhs = 5.0 * L * std::log(1.0 / L) / (6.0 * vn);
    rep.lower_bound_holds = rep.grad_norm >= rep.lemma6_rhs;
  }
  rep.gated = vn > 0.0 && L <= std::pow(static_cast<double>(D.size()), -(1.0 + C1));
  return rep;
}

VerdictRow lemma4_check(const ParamMatrix& V, const Dataset& D, const Activation& act, double slack) {
  const Evaluation e = evaluate(V, D, act);
  const double bound = std::sqrt(2.0 * static_cast<double>(V.half_width())) * std::min(e.loss.total, 1.0);
  const double gn = e.gradient.norm();
  return {"lemma4.grad_upper", "hard", gn <= bound + slack, gn, bound, ""};
}

VerdictRow lemma12_check(const ParamMatrix& V, const Dataset& D, const Activation& act) {
  const LossReport r = loss(V, D, act);
  VerdictRow row{"lemma12.g_le_loss", "hard", true, -std::numeric_limits<double>::infinity(), 0.0, ""};
  for (std::size_t s = 0; s < D.size(); ++s) {
    const double curv = r.g[s] * sigmoid(r.margins[s]);
    const double excess = std::max(r.g[s] - r.per_example[s], curv - r.g[s]);
    if (excess > row.worst_value) {
      row.worst_value = excess;
      row.witness = "sample " + std::to_string(s);
    }
    if (!(r.g[s] <= r.per_example[s]) || !(curv <= r.g[s])) row.passed = false;
  }
  return row;
}

}  // namespace hubergd
