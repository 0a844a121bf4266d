#pragma once

#include <iosfwd>

namespace pidforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Entry point of the `pidforge` executable. Logs go to `err` as
/// logfmt lines; machine-readable output goes to files or `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pidforge::cli
