#include "hubergd/activation.hpp"

#include <string>

#include "hubergd/error.hpp"

namespace hubergd {

Activation Activation::huberized(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorKind::invalid_parameter,
                "huberized bandwidth must be positive and finite, got " + std::to_string(h));
  }
  return Activation(Kind::huberized, h);
}

namespace {
void require_finite(double z) {
  if (!std::isfinite(z)) throw Error(ErrorKind::invalid_input, "activation input is not finite");
}
}  // namespace

double phi(double z, const Activation& act) {
  require_finite(z);
  return detail::phi(z, act);
}

double phi_prime(double z, const Activation& act) {
  require_finite(z);
  return detail::phi_prime(z, act);
}

double gamma(double z, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_parameter, "gamma requires h > 0");
  require_finite(z);
  return detail::gamma(z, h);
}

}  // namespace hubergd
