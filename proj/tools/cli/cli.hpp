#pragma once

#include <iosfwd>

namespace geoshadow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitProcessingError = 3;
inline constexpr int kExitPartialFailure = 4;

/// Entry point shared by the geoshadow binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geoshadow::cli
