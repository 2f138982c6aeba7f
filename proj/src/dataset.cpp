#include "hubergd/dataset.hpp"

#include <cmath>
#include <string>

#include "hubergd/error.hpp"

namespace hubergd {

void Dataset::push_back(std::span<const double> x, int label, int cluster) {
  if (x.size() != dim) throw Error(ErrorKind::shape, "feature dimension mismatch");
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
  if (cluster != 0) {
    cluster_of.resize(labels.size() - 1, 0);
    cluster_of.push_back(cluster);
  } else if (!cluster_of.empty()) {
    cluster_of.push_back(0);
  }
}

void Dataset::check_well_formed() const {
  if (dim == 0) throw Error(ErrorKind::invalid_input, "dataset dimension is zero");
  if (features.size() != labels.size() * dim) {
    throw Error(ErrorKind::shape, "feature buffer does not match n * dim");
  }
  for (std::size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] != 1 && labels[s] != -1) {
      throw Error(ErrorKind::invalid_input,
                  "label of sample " + std::to_string(s) + " is not +1/-1");
    }
  }
  for (double v : features) {
    if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "non-finite feature value");
  }
  if (!cluster_of.empty()) {
    if (cluster_of.size() != labels.size()) {
      throw Error(ErrorKind::shape, "cluster_of size does not match sample count");
    }
    for (int k : cluster_of) {
      if (k < 1 || k > 4) throw Error(ErrorKind::invalid_input, "cluster index outside [1, 4]");
    }
  }
}

double Dataset::max_feature_norm() const noexcept {
  double m = 0.0;
  for (std::size_t s = 0; s < size(); ++s) {
    double acc = 0.0;
    for (double v : feature(s)) acc += v * v;
    m = std::max(m, std::sqrt(acc));
  }
  return m;
}

}  // namespace hubergd
