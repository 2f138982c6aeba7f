#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hubergd {

/// n labelled feature rows (row-major). `cluster_of` is either empty or holds
/// one cluster index in [1, 4] per sample. `lifted` records whether the rows
/// went through the (x/sqrt2, 1/sqrt2) map, which changes the form of the
/// cluster assumptions the validator checks.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<int> cluster_of;
  bool lifted = false;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }
  bool has_clusters() const noexcept { return !cluster_of.empty(); }

  std::span<const double> feature(std::size_t s) const noexcept {
    return {features.data() + s * dim, dim};
  }
  std::span<double> feature(std::size_t s) noexcept { return {features.data() + s * dim, dim}; }

  void push_back(std::span<const double> x, int label, int cluster = 0);

  // Throws on inconsistent sizes, labels outside {-1, 1}, or non-finite entries.
  void check_well_formed() const;

  double max_feature_norm() const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

}  // namespace hubergd
