#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "hubergd/activation.hpp"
#include "hubergd/dataset.hpp"
#include "hubergd/param_matrix.hpp"
#include "hubergd/rng.hpp"

namespace hubergd::oracles {

/// Side of the largest weak Hessian dense_weak_hessian will build.
constexpr std::size_t kDenseLimit = 4096;

/// Default central-difference step: 1e-6 * max(1, ||V||_inf).
double default_fd_step(const ParamMatrix& V);

/// Central differences of the training loss, one coordinate at a time.
ParamMatrix fd_grad(const ParamMatrix& V, const Dataset& D, const Activation& act,
                    std::optional<double> eps = std::nullopt);

/// Central differences of the analytic gradient along w:
/// (grad(V + eps w) - grad(V - eps w)) / (2 eps).
ParamMatrix fd_hvp(const ParamMatrix& V, const Dataset& D, const ParamMatrix& w,
                   const Activation& act, std::optional<double> eps = std::nullopt);

/// Materializes the weak Hessian block by block, computing margins and
/// preactivations on its own. Coordinates are ordered row-major like
/// ParamMatrix::values().
Eigen::MatrixXd dense_weak_hessian(const ParamMatrix& V, const Dataset& D, double h);

/// Largest |eigenvalue| of a symmetric matrix via full eigendecomposition.
double exact_operator_norm(const Eigen::MatrixXd& H);

/// min over (i, s) of dist(v_i . x_s, {0, h}).
double kink_distance(const ParamMatrix& V, const Dataset& D, double h);

struct Instance {
  ParamMatrix V;
  Dataset data;
};

/// Random unit-norm dataset (balanced labels) and Gaussian weights with
/// entries of deviation `scale`.
Instance random_instance(Rng& rng, std::size_t p, std::size_t d, std::size_t n, double scale);

/// Resamples weights until kink_distance >= min_kink. Throws Error(resource)
/// after max_tries.
Instance random_smooth_instance(Rng& rng, std::size_t p, std::size_t d, std::size_t n,
                                double scale, double h, double min_kink = 1e-3,
                                int max_tries = 10000);

}  // namespace hubergd::oracles
