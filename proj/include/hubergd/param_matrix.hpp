#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hubergd {

/// Hidden-layer weights of the two-layer network: 2p rows of length `dim`,
/// stored row-major. Rows [0, p) feed the output with sign +1, rows
/// [p, 2p) with sign -1. The output signs are fixed and never trained.
class ParamMatrix {
 public:
  ParamMatrix() = default;
  ParamMatrix(std::size_t half_width, std::size_t dim);

  std::size_t half_width() const noexcept { return half_width_; }
  std::size_t rows() const noexcept { return 2 * half_width_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }

  double output_sign(std::size_t i) const noexcept { return i < half_width_ ? 1.0 : -1.0; }

  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }

  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * dim_ + j]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const ParamMatrix& other) const noexcept {
    return half_width_ == other.half_width_ && dim_ == other.dim_;
  }
  bool all_finite() const noexcept;

  // Frobenius norm.
  double norm() const noexcept;
  double max_abs() const noexcept;

  ParamMatrix& operator*=(double s) noexcept;
  ParamMatrix& operator+=(const ParamMatrix& other);
  ParamMatrix& operator-=(const ParamMatrix& other);
  // this += a * x
  ParamMatrix& axpy(double a, const ParamMatrix& x);

  friend bool operator==(const ParamMatrix&, const ParamMatrix&) = default;

 private:
  std::size_t half_width_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

ParamMatrix operator*(double s, ParamMatrix m);
ParamMatrix operator+(ParamMatrix a, const ParamMatrix& b);
ParamMatrix operator-(ParamMatrix a, const ParamMatrix& b);

// Frobenius inner product, ascending index order.
double dot(const ParamMatrix& a, const ParamMatrix& b);
double dot(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace hubergd
