#pragma once

#include <iosfwd>

namespace hubergd {

/// Exit codes: 0 success, 2 when a hard invariant fails, 1 on any error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hubergd
