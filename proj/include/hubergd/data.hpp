#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hubergd/dataset.hpp"

namespace hubergd {

/// Four-cluster assumption bundle. Clusters 1 and 2 carry label +1,
/// clusters 3 and 4 carry label -1.
struct ClusterSpec {
  std::array<std::vector<double>, 4> centers;
  double radius = 0.05;
  double separation = 0.05;
  double balance = 0.05;
  std::size_t n = 128;

  static constexpr std::array<int, 4> labels{1, 1, -1, -1};

  /// Centers e_1, e_2 (positive) and e_3, e_4 (negative) in dimension d >= 4;
  /// every opposite-label pair is orthogonal.
  static ClusterSpec orthogonal(std::size_t d, double r, double delta, double eps, std::size_t n);

  std::size_t dim() const noexcept { return centers[0].size(); }
};

struct MixtureComponent {
  std::vector<double> mean;
  int label = 1;
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;
  double covariance_scale = 0.01;  // isotropic variance
  std::size_t n = 128;

  static MixtureSpec xor_preset(std::size_t n = 128);
  static MixtureSpec shoulders_preset(std::size_t n = 128);
};

// Per-cluster sizes as even as possible, in cluster order.
std::array<std::size_t, 4> cluster_sizes(std::size_t n);

/// Throws Error(spec_validation) naming the first violated assumption.
void check_cluster_spec(const ClusterSpec& spec);

Dataset generate_clusters(const ClusterSpec& spec, std::uint64_t seed);
Dataset generate_mixture(const MixtureSpec& spec, std::uint64_t seed, bool normalize = false);

/// n points uniform on the unit sphere in dimension d, labels alternating +1, -1.
Dataset random_unit_points(std::size_t d, std::size_t n, std::uint64_t seed);

/// x -> (x / sqrt2, 1 / sqrt2). Requires unit-norm rows.
Dataset lift_dataset(const Dataset& D);
/// Appends a constant coordinate: x -> (scale * x, scale * constant). No norm
/// requirement; `lift_dataset` is scale = constant = 1/sqrt2 after checking norms,
/// explicit-bias training uses scale = 1, constant = 1.
Dataset append_constant(const Dataset& D, double scale, double constant);

std::vector<double> lift_point(const std::vector<double>& x);

struct LiftedSchedule {
  double sigma = 0.0;
  std::vector<double> steps;
};
// sigma -> sqrt2 sigma, alpha_t -> 2 alpha_t.
LiftedSchedule lift_init_and_steps(double sigma, const std::vector<double>& steps);

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  double worst_value = 0.0;
  double threshold = 0.0;
  std::string witness;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const noexcept;
  const AssumptionCheck* find(const std::string& name) const noexcept;
};

/// Checks unit norms, cluster radius, center norms, opposite-label center
/// separation, cluster balance, and the pairwise inner-product bounds that
/// follow from them after lifting. Uses the lifted form of each assumption
/// when `D.lifted` is set.
ValidationReport validate_assumptions(const Dataset& D, const ClusterSpec& spec);

}  // namespace hubergd
