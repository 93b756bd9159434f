#pragma once

namespace polyclt::cli {

/// Exit statuses of the polyclt binary.
inline constexpr int kOk = 0;
inline constexpr int kValidationFailure = 2;
inline constexpr int kNumericalFailure = 3;
inline constexpr int kUsage = 64;

int run(int argc, const char* const* argv);

}  // namespace polyclt::cli
