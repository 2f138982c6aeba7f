#include "hubergd/error.hpp"

namespace hubergd {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid input";
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::shape: return "shape mismatch";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::unsupported: return "unsupported operation";
    case ErrorKind::spec_validation: return "spec validation";
    case ErrorKind::resource: return "resource limit";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::parse: return "parse error";
  }
  return "error";
}

}  // namespace hubergd
