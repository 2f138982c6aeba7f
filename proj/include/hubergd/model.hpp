#pragma once

#include <span>
#include <vector>

#include "hubergd/activation.hpp"
#include "hubergd/dataset.hpp"
#include "hubergd/param_matrix.hpp"

namespace hubergd {

struct LossReport {
  double total = 0.0;               // mean of per_example
  std::vector<double> per_example;  // ln(1 + exp(-margin))
  std::vector<double> g;            // 1 / (1 + exp(margin))
  std::vector<double> margins;      // y_s f_V(x_s)
};

/// Loss and gradient at one point, sharing the preactivation pass.
struct Evaluation {
  LossReport loss;
  ParamMatrix gradient;
};

// ln(1 + exp(-m)) without overflow for |m| in the hundreds.
double log1p_exp_neg(double m) noexcept;
// Logistic sigmoid 1 / (1 + exp(-m)).
double sigmoid(double m) noexcept;

double forward(const ParamMatrix& V, std::span<const double> x, const Activation& act);
LossReport loss(const ParamMatrix& V, const Dataset& D, const Activation& act);
ParamMatrix grad(const ParamMatrix& V, const Dataset& D, const Activation& act);
Evaluation evaluate(const ParamMatrix& V, const Dataset& D, const Activation& act);

/// Weak-Hessian-vector product, applied blockwise without materializing the
/// 2p(d+1)-square matrix. Huberized activation only.
ParamMatrix hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w,
                const Activation& act);

/// Serial implementations of the same kernels. Summation order matches the
/// OpenMP kernels exactly, so outputs are bit-identical; kept for testing and
/// the benchmark.
namespace reference {
LossReport loss(const ParamMatrix& V, const Dataset& D, const Activation& act);
ParamMatrix grad(const ParamMatrix& V, const Dataset& D, const Activation& act);
ParamMatrix hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w,
                const Activation& act);
}  // namespace reference

}  // namespace hubergd
