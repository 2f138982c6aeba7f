#pragma once

#include <stdexcept>
#include <string>

namespace hubergd {

enum class ErrorKind {
  invalid_input,
  invalid_parameter,
  shape,
  domain,
  unsupported,
  spec_validation,
  resource,
  io,
  parse,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the
/// failure class so callers (the CLI in particular) can map it to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hubergd
