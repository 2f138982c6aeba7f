#include "hubergd/param_matrix.hpp"

#include <cmath>

#include "hubergd/error.hpp"

namespace hubergd {

ParamMatrix::ParamMatrix(std::size_t half_width, std::size_t dim)
    : half_width_(half_width), dim_(dim), values_(2 * half_width * dim, 0.0) {
  if (half_width == 0 || dim == 0) {
    throw Error(ErrorKind::invalid_parameter, "ParamMatrix needs p >= 1 and dim >= 1");
  }
}

bool ParamMatrix::all_finite() const noexcept {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double ParamMatrix::norm() const noexcept {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return std::sqrt(acc);
}

double ParamMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

ParamMatrix& ParamMatrix::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

namespace {
void require_same_shape(const ParamMatrix& a, const ParamMatrix& b) {
  if (!a.same_shape(b)) throw Error(ErrorKind::shape, "ParamMatrix shapes differ");
}
}  // namespace

ParamMatrix& ParamMatrix::operator+=(const ParamMatrix& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ParamMatrix& ParamMatrix::operator-=(const ParamMatrix& other) {
  require_same_shape(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ParamMatrix& ParamMatrix::axpy(double a, const ParamMatrix& x) {
  require_same_shape(*this, x);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

ParamMatrix operator*(double s, ParamMatrix m) { return m *= s; }
ParamMatrix operator+(ParamMatrix a, const ParamMatrix& b) { return a += b; }
ParamMatrix operator-(ParamMatrix a, const ParamMatrix& b) { return a -= b; }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double dot(const ParamMatrix& a, const ParamMatrix& b) {
  require_same_shape(a, b);
  return dot(a.values(), b.values());
}

}  // namespace hubergd
