#pragma once

namespace ruin::cli {

/// Exit codes: 0 success, 1 usage / validation error, 2 property violated.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kPropertyViolated = 2;

int run(int argc, const char* const* argv);

}  // namespace ruin::cli
