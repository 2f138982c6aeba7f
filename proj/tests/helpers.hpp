#pragma once

// Independent long-double evaluations straight from the formulas, used as
// oracles against the library kernels.

#include <cmath>
#include <vector>

#include "hubergd/dataset.hpp"
#include "hubergd/param_matrix.hpp"
#include "hubergd/rng.hpp"

namespace testing_oracle {

using hubergd::Dataset;
using hubergd::ParamMatrix;

inline long double phi(long double z, long double h) {
  if (z < 0) return 0;
  if (z <= h) return z * z / (2 * h);
  return z - h / 2;
}

inline long double dphi(long double z, long double h) {
  if (z < 0) return 0;
  if (z <= h) return z / h;
  return 1;
}

inline long double pre(const ParamMatrix& V, std::size_t i, const Dataset& D, std::size_t s) {
  long double acc = 0;
  for (std::size_t j = 0; j < D.dim; ++j) acc += static_cast<long double>(V(i, j)) * D.features[s * D.dim + j];
  return acc;
}

inline long double f(const ParamMatrix& V, const Dataset& D, std::size_t s, long double h) {
  long double acc = 0;
  for (std::size_t i = 0; i < V.rows(); ++i) acc += (i < V.half_width() ? 1 : -1) * phi(pre(V, i, D, s), h);
  return acc;
}

inline long double loss(const ParamMatrix& V, const Dataset& D, long double h) {
  long double acc = 0;
  for (std::size_t s = 0; s < D.size(); ++s) {
    const long double m = D.labels[s] * f(V, D, s, h);
    acc += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
  }
  return acc / D.size();
}

inline std::vector<long double> grad(const ParamMatrix& V, const Dataset& D, long double h) {
  std::vector<long double> G(V.size(), 0);
  for (std::size_t s = 0; s < D.size(); ++s) {
    const long double m = D.labels[s] * f(V, D, s, h);
    const long double g = 1 / (1 + std::exp(m));
    for (std::size_t i = 0; i < V.rows(); ++i) {
      const long double u = i < V.half_width() ? 1 : -1;
      const long double c = -u * g * D.labels[s] * dphi(pre(V, i, D, s), h) / D.size();
      for (std::size_t j = 0; j < D.dim; ++j) G[i * D.dim + j] += c * D.features[s * D.dim + j];
    }
  }
  return G;
}

// Weak Hessian applied to w, assembled entry by entry.
inline std::vector<long double> hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w, long double h) {
  const std::size_t rows = V.rows(), dim = D.dim;
  std::vector<long double> out(V.size(), 0);
  for (std::size_t s = 0; s < D.size(); ++s) {
    const long double m = D.labels[s] * f(V, D, s, h);
    const long double g = 1 / (1 + std::exp(m));
    const long double c = g * (1 - g);
    for (std::size_t i = 0; i < rows; ++i) {
      const long double ui = i < V.half_width() ? 1 : -1;
      const long double zi = pre(V, i, D, s);
      for (std::size_t k = 0; k < rows; ++k) {
        const long double uk = k < V.half_width() ? 1 : -1;
        long double coef = ui * uk * dphi(zi, h) * dphi(pre(V, k, D, s), h) * c;
        if (i == k && zi >= 0 && zi <= h) coef -= ui * D.labels[s] * g / h;
        if (coef == 0) continue;
        long double wx = 0;
        for (std::size_t j = 0; j < dim; ++j) wx += static_cast<long double>(w(k, j)) * D.features[s * dim + j];
        for (std::size_t j = 0; j < dim; ++j) out[i * dim + j] += coef * wx * D.features[s * dim + j] / D.size();
      }
    }
  }
  return out;
}

inline double rel_diff(const std::vector<long double>& a, std::span<const double> b) {
  long double num = 0, den = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += (a[k] - b[k]) * (a[k] - b[k]);
    den += a[k] * a[k];
  }
  if (den == 0) return static_cast<double>(std::sqrt(num));
  return static_cast<double>(std::sqrt(num / den));
}

inline ParamMatrix random_matrix(hubergd::Rng& rng, std::size_t p, std::size_t d, double scale) {
  ParamMatrix V(p, d);
  for (double& v : V.values()) v = scale * rng.normal();
  return V;
}

inline Dataset unit_dataset(hubergd::Rng& rng, std::size_t d, std::size_t n) {
  Dataset D;
  D.dim = d;
  std::vector<double> x(d);
  for (std::size_t s = 0; s < n; ++s) {
    double nn = 0;
    for (double& v : x) {
      v = rng.normal();
      nn += v * v;
    }
    nn = std::sqrt(nn);
    for (double& v : x) v /= nn;
    D.push_back(x, rng.uniform() < 0.5 ? 1 : -1);
  }
  return D;
}

}  // namespace testing_oracle
