#pragma once

#include <iosfwd>

namespace gkcp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitConfigError = 3;

/// Entry point of the gkcp tool. Reports go to `out` unless an output path is
/// given; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gkcp
