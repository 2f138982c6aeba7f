#include "hubergd/model.hpp"

#include <cmath>
#include <cstddef>

#include "model_common.hpp"

namespace hubergd {

// Work (in multiply-adds) below which kernels stay on the calling thread.
constexpr std::size_t kParallelThreshold = 1 << 15;

double log1p_exp_neg(double m) noexcept {
  if (m >= 0.0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

double sigmoid(double m) noexcept {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

namespace {

// Z[i * n + s] = v_i . x_s
std::vector<double> preactivations(const ParamMatrix& V, const Dataset& D) {
  const std::size_t rows = V.rows();
  const std::size_t n = D.size();
  const std::size_t dim = D.dim;
  std::vector<double> Z(rows * n);
  const bool par = rows * n * dim > kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t i = 0; i < rows; ++i) {
    const auto v = V.row(i);
    for (std::size_t s = 0; s < n; ++s) Z[i * n + s] = dot(v, D.feature(s));
  }
  return Z;
}

// Same as preactivations() but with the rows of a direction matrix.
std::vector<double> projections(const ParamMatrix& w, const Dataset& D) {
  return preactivations(w, D);
}

LossReport loss_from_preactivations(const ParamMatrix& V, const Dataset& D,
                                    const std::vector<double>& Z, const Activation& act) {
  const std::size_t rows = V.rows();
  const std::size_t n = D.size();
  LossReport r;
  r.per_example.resize(n);
  r.g.resize(n);
  r.margins.resize(n);
  const bool par = rows * n > kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t s = 0; s < n; ++s) {
    double f = 0.0;
    for (std::size_t i = 0; i < rows; ++i) f += V.output_sign(i) * detail::phi(Z[i * n + s], act);
    const double m = D.labels[s] * f;
    r.margins[s] = m;
    r.per_example[s] = log1p_exp_neg(m);
    r.g[s] = sigmoid(-m);
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < n; ++s) acc += r.per_example[s];
  r.total = acc / static_cast<double>(n);
  return r;
}

ParamMatrix grad_from_preactivations(const ParamMatrix& V, const Dataset& D,
                                     const std::vector<double>& Z, const LossReport& r,
                                     const Activation& act) {
  const std::size_t rows = V.rows();
  const std::size_t n = D.size();
  const std::size_t dim = D.dim;
  const double inv_n = 1.0 / static_cast<double>(n);
  ParamMatrix G(V.half_width(), dim);
  const bool par = rows * n * dim > kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t i = 0; i < rows; ++i) {
    auto out = G.row(i);
    for (std::size_t s = 0; s < n; ++s) {
      const double c = r.g[s] * D.labels[s] * detail::phi_prime(Z[i * n + s], act);
      if (c == 0.0) continue;
      const auto x = D.feature(s);
      for (std::size_t j = 0; j < dim; ++j) out[j] += c * x[j];
    }
    const double scale = -V.output_sign(i) * inv_n;
    for (std::size_t j = 0; j < dim; ++j) out[j] *= scale;
  }
  return G;
}

}  // namespace

double forward(const ParamMatrix& V, std::span<const double> x, const Activation& act) {
  if (x.size() != V.dim()) throw Error(ErrorKind::shape, "input dimension mismatch");
  double f = 0.0;
  for (std::size_t i = 0; i < V.rows(); ++i) f += V.output_sign(i) * detail::phi(dot(V.row(i), x), act);
  return f;
}

LossReport loss(const ParamMatrix& V, const Dataset& D, const Activation& act) {
  detail::check_inputs(V, D);
  return loss_from_preactivations(V, D, preactivations(V, D), act);
}

ParamMatrix grad(const ParamMatrix& V, const Dataset& D, const Activation& act) {
  return evaluate(V, D, act).gradient;
}

Evaluation evaluate(const ParamMatrix& V, const Dataset& D, const Activation& act) {
  detail::check_inputs(V, D);
  const auto Z = preactivations(V, D);
  Evaluation e;
  e.loss = loss_from_preactivations(V, D, Z, act);
  e.gradient = grad_from_preactivations(V, D, Z, e.loss, act);
  return e;
}

ParamMatrix hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w,
                const Activation& act) {
  if (!act.is_huberized()) {
    throw Error(ErrorKind::unsupported, "weak Hessian is only defined for the Huberized ReLU");
  }
  detail::check_inputs(V, D);
  detail::check_direction(V, w);
  const std::size_t rows = V.rows();
  const std::size_t n = D.size();
  const std::size_t dim = D.dim;
  const double h = act.bandwidth();
  const auto Z = preactivations(V, D);
  const auto W = projections(w, D);
  const LossReport r = loss_from_preactivations(V, D, Z, act);

  // a_s = sum_j u_j phi'(v_j.x_s) (w_j.x_s); curvature c_s = g_s (1 - g_s).
  std::vector<double> a(n), curv(n);
  const bool par_s = rows * n > kParallelThreshold;
#pragma omp parallel for schedule(static) if (par_s)
  for (std::size_t s = 0; s < n; ++s) {
    double acc = 0.0;
    for (std::size_t j = 0; j < rows; ++j) {
      acc += V.output_sign(j) * detail::phi_prime(Z[j * n + s], act) * W[j * n + s];
    }
    a[s] = acc;
    curv[s] = r.g[s] * sigmoid(r.margins[s]);
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  ParamMatrix out(V.half_width(), dim);
  const bool par = rows * n * dim > kParallelThreshold;
#pragma omp parallel for schedule(static) if (par)
  for (std::size_t i = 0; i < rows; ++i) {
    auto o = out.row(i);
    for (std::size_t s = 0; s < n; ++s) {
      const double zis = Z[i * n + s];
      const double c = curv[s] * a[s] * detail::phi_prime(zis, act) -
                       detail::gamma(zis, h) * D.labels[s] * r.g[s] * W[i * n + s];
      if (c == 0.0) continue;
      const auto x = D.feature(s);
      for (std::size_t j = 0; j < dim; ++j) o[j] += c * x[j];
    }
    const double scale = V.output_sign(i) * inv_n;
    for (std::size_t j = 0; j < dim; ++j) o[j] *= scale;
  }
  return out;
}

}  // namespace hubergd
