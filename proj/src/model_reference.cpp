#include <cmath>
#include <vector>

#include "hubergd/model.hpp"
#include "model_common.hpp"

namespace hubergd::reference {

namespace {

double preactivation(const ParamMatrix& V, std::size_t i, const Dataset& D, std::size_t s) {
  double acc = 0.0;
  for (std::size_t j = 0; j < D.dim; ++j) acc += V(i, j) * D.features[s * D.dim + j];
  return acc;
}

}  // namespace

LossReport loss(const ParamMatrix& V, const Dataset& D, const Activation& act) {
  detail::check_inputs(V, D);
  const std::size_t n = D.size();
  LossReport r;
  double acc = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double f = 0.0;
    for (std::size_t i = 0; i < V.rows(); ++i) {
      f += V.output_sign(i) * detail::phi(preactivation(V, i, D, s), act);
    }
    const double m = D.labels[s] * f;
    r.margins.push_back(m);
    r.per_example.push_back(log1p_exp_neg(m));
    r.g.push_back(sigmoid(-m));
    acc += r.per_example.back();
  }
  r.total = acc / static_cast<double>(n);
  return r;
}

ParamMatrix grad(const ParamMatrix& V, const Dataset& D, const Activation& act) {
  const LossReport r = reference::loss(V, D, act);
  const std::size_t n = D.size();
  ParamMatrix G(V.half_width(), D.dim);
  for (std::size_t i = 0; i < V.rows(); ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      const double c = r.g[s] * D.labels[s] * detail::phi_prime(preactivation(V, i, D, s), act);
      if (c == 0.0) continue;
      for (std::size_t j = 0; j < D.dim; ++j) G(i, j) += c * D.features[s * D.dim + j];
    }
    for (std::size_t j = 0; j < D.dim; ++j) G(i, j) *= -V.output_sign(i) * (1.0 / static_cast<double>(n));
  }
  return G;
}

ParamMatrix hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w,
                const Activation& act) {
  if (!act.is_huberized()) {
    throw Error(ErrorKind::unsupported, "weak Hessian is only defined for the Huberized ReLU");
  }
  detail::check_inputs(V, D);
  detail::check_direction(V, w);
  const LossReport r = reference::loss(V, D, act);
  const std::size_t n = D.size();
  const double h = act.bandwidth();
  std::vector<double> a(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < V.rows(); ++j) {
      a[s] += V.output_sign(j) * detail::phi_prime(preactivation(V, j, D, s), act) *
              preactivation(w, j, D, s);
    }
  }
  ParamMatrix out(V.half_width(), D.dim);
  for (std::size_t i = 0; i < V.rows(); ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      const double z = preactivation(V, i, D, s);
      const double curv = r.g[s] * sigmoid(r.margins[s]);
      const double c = curv * a[s] * detail::phi_prime(z, act) -
                       detail::gamma(z, h) * D.labels[s] * r.g[s] * preactivation(w, i, D, s);
      if (c == 0.0) continue;
      for (std::size_t j = 0; j < D.dim; ++j) out(i, j) += c * D.features[s * D.dim + j];
    }
    for (std::size_t j = 0; j < D.dim; ++j) out(i, j) *= V.output_sign(i) * (1.0 / static_cast<double>(n));
  }
  return out;
}

}  // namespace hubergd::reference
