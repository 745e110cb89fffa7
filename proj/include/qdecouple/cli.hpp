#pragma once

#include <iosfwd>

namespace qdecouple::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kVerificationFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kInvariant = 3;

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdecouple::cli
