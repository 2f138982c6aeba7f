#pragma once

#include "hubergd/dataset.hpp"
#include "hubergd/error.hpp"
#include "hubergd/param_matrix.hpp"

namespace hubergd::detail {

inline void check_inputs(const ParamMatrix& V, const Dataset& D) {
  if (D.empty()) throw Error(ErrorKind::invalid_input, "dataset is empty");
  if (V.dim() != D.dim) {
    throw Error(ErrorKind::shape, "weight row dimension " + std::to_string(V.dim()) +
                                      " does not match feature dimension " +
                                      std::to_string(D.dim));
  }
}

inline void check_direction(const ParamMatrix& V, const ParamMatrix& w) {
  if (!V.same_shape(w)) throw Error(ErrorKind::shape, "direction shape differs from weights");
}

}  // namespace hubergd::detail
