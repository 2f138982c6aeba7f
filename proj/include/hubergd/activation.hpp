#pragma once

#include <cmath>

namespace hubergd {

/// Hidden-unit nonlinearity. Huberized ReLU carries its bandwidth h:
///   phi(z) = 0            z < 0
///          = z^2 / (2h)   0 <= z <= h
///          = z - h/2      z > h
class Activation {
 public:
  enum class Kind { huberized, standard_relu };

  static Activation huberized(double h);
  static Activation standard_relu() { return Activation(Kind::standard_relu, 0.0); }

  Kind kind() const noexcept { return kind_; }
  bool is_huberized() const noexcept { return kind_ == Kind::huberized; }
  // Zero for the standard ReLU.
  double bandwidth() const noexcept { return h_; }

 private:
  Activation(Kind kind, double h) : kind_(kind), h_(h) {}

  Kind kind_;
  double h_;
};

// Checked entry points; throw hubergd::Error on non-finite input.
double phi(double z, const Activation& act);
double phi_prime(double z, const Activation& act);
// Weak derivative of phi_prime: 1/h on [0, h], 0 elsewhere.
double gamma(double z, double h);

namespace detail {

// Unchecked kernels used inside the hot loops.
inline double phi(double z, const Activation& act) noexcept {
  if (z < 0.0) return 0.0;
  if (!act.is_huberized()) return z;
  const double h = act.bandwidth();
  if (z <= h) return z * z / (2.0 * h);
  return z - h / 2.0;
}

inline double phi_prime(double z, const Activation& act) noexcept {
  if (z < 0.0) return 0.0;
  if (!act.is_huberized()) return z > 0.0 ? 1.0 : 0.0;
  const double h = act.bandwidth();
  if (z <= h) return z / h;
  return 1.0;
}

inline double gamma(double z, double h) noexcept {
  return (z >= 0.0 && z <= h) ? 1.0 / h : 0.0;
}

}  // namespace detail
}  // namespace hubergd
