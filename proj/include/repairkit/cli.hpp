#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repairkit::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

enum ExitCode : int { kOk = 0, kEmpty = 1, kInputError = 2 };

/// Runs the command line; returns the process exit code.
int run(int argc, const char *const *argv);
int run(const std::vector<std::string> &args);

} // namespace repairkit::cli
