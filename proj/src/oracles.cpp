#include "hubergd/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hubergd/error.hpp"
#include "hubergd/model.hpp"

namespace hubergd::oracles {

double default_fd_step(const ParamMatrix& V) { return 1e-6 * std::max(1.0, V.max_abs()); }

ParamMatrix fd_grad(const ParamMatrix& V, const Dataset& D, const Activation& act,
                    std::optional<double> eps) {
  const double step = eps.value_or(default_fd_step(V));
  if (!(step > 0.0)) throw Error(ErrorKind::invalid_parameter, "fd step must be positive");
  ParamMatrix G(V.half_width(), V.dim());
  ParamMatrix probe = V;
  auto coords = probe.values();
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const double orig = coords[k];
    coords[k] = orig + step;
    const double up = loss(probe, D, act).total;
    coords[k] = orig - step;
    const double down = loss(probe, D, act).total;
    coords[k] = orig;
    G.values()[k] = (up - down) / (2.0 * step);
  }
  return G;
}

ParamMatrix fd_hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w,
                   const Activation& act, std::optional<double> eps) {
  const double step = eps.value_or(default_fd_step(V));
  ParamMatrix up = V;
  up.axpy(step, w);
  ParamMatrix down = V;
  down.axpy(-step, w);
  ParamMatrix out = grad(up, D, act);
  out -= grad(down, D, act);
  out *= 1.0 / (2.0 * step);
  return out;
}

Eigen::MatrixXd dense_weak_hessian(const ParamMatrix& V, const Dataset& D, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_parameter, "h must be positive");
  if (V.dim() != D.dim) throw Error(ErrorKind::shape, "weight and feature dimensions differ");
  if (D.empty()) throw Error(ErrorKind::invalid_input, "dataset is empty");
  const std::size_t rows = V.rows();
  const std::size_t dim = V.dim();
  const std::size_t side = rows * dim;
  if (side > kDenseLimit) {
    throw Error(ErrorKind::resource, "dense weak Hessian of side " + std::to_string(side) +
                                         " exceeds " + std::to_string(kDenseLimit));
  }
  const std::size_t n = D.size();

  // Preactivations and per-sample weights, from first principles.
  Eigen::MatrixXd X(n, dim);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < dim; ++j) X(s, j) = D.features[s * dim + j];
  }
  Eigen::MatrixXd W(rows, dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < dim; ++j) W(i, j) = V(i, j);
  }
  const Eigen::MatrixXd Z = W * X.transpose();  // rows x n
  Eigen::MatrixXd dphi(rows, n), gam(rows, n);
  std::vector<double> g(n), curv(n);
  for (std::size_t s = 0; s < n; ++s) {
    double f = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      const double z = Z(i, s);
      const double u = V.output_sign(i);
      double value = 0.0;
      if (z >= 0.0 && z <= h) {
        value = z * z / (2.0 * h);
        dphi(i, s) = z / h;
        gam(i, s) = 1.0 / h;
      } else if (z > h) {
        value = z - h / 2.0;
        dphi(i, s) = 1.0;
        gam(i, s) = 0.0;
      } else {
        dphi(i, s) = 0.0;
        gam(i, s) = 0.0;
      }
      f += u * value;
    }
    const double m = D.labels[s] * f;
    // g = 1/(1+e^m), curv = e^m/(1+e^m)^2, both without overflow.
    const double em = std::exp(-std::abs(m));
    g[s] = m >= 0.0 ? em / (1.0 + em) : 1.0 / (1.0 + em);
    curv[s] = em / ((1.0 + em) * (1.0 + em));
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(side, side);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Eigen::MatrixXd xx = X.row(s).transpose() * X.row(s);
    for (std::size_t i = 0; i < rows; ++i) {
      const double ui = V.output_sign(i);
      for (std::size_t j = 0; j < rows; ++j) {
        const double uj = V.output_sign(j);
        double coef = ui * uj * dphi(i, s) * dphi(j, s) * curv[s];
        if (i == j) coef += -ui * gam(i, s) * D.labels[s] * g[s];
        if (coef == 0.0) continue;
        H.block(i * dim, j * dim, dim, dim) += (coef * inv_n) * xx;
      }
    }
  }
  return H;
}

double exact_operator_norm(const Eigen::MatrixXd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::domain, "eigensolver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double kink_distance(const ParamMatrix& V, const Dataset& D, double h) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < V.rows(); ++i) {
    for (std::size_t s = 0; s < D.size(); ++s) {
      const double z = dot(V.row(i), D.feature(s));
      best = std::min({best, std::abs(z), std::abs(z - h)});
    }
  }
  return best;
}

Instance random_instance(Rng& rng, std::size_t p, std::size_t d, std::size_t n, double scale) {
  Instance inst{ParamMatrix(p, d), Dataset{}};
  inst.data.dim = d;
  std::vector<double> x(d);
  for (std::size_t s = 0; s < n; ++s) {
    double nn = 0.0;
    do {
      nn = 0.0;
      for (auto& v : x) {
        v = rng.normal();
        nn += v * v;
      }
    } while (nn < 1e-12);
    nn = std::sqrt(nn);
    for (auto& v : x) v /= nn;
    inst.data.push_back(x, s % 2 == 0 ? 1 : -1);
  }
  for (double& v : inst.V.values()) v = scale * rng.normal();
  return inst;
}

Instance random_smooth_instance(Rng& rng, std::size_t p, std::size_t d, std::size_t n,
                                double scale, double h, double min_kink, int max_tries) {
  Instance inst = random_instance(rng, p, d, n, scale);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    if (kink_distance(inst.V, inst.data, h) >= min_kink) return inst;
    for (double& v : inst.V.values()) v = scale * rng.normal();
  }
  throw Error(ErrorKind::resource, "could not sample a configuration away from the kinks");
}

}  // namespace hubergd::oracles
