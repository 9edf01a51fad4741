#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iscore::cli {

/// Seed behind `reproduce --table 4|6` when none is given; chosen once so the
/// shipped study tables regenerate identically.
inline constexpr std::uint64_t kDefaultStudySeed = 20260809;

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric/domain error.
int dispatch(const std::vector<std::string>& args);

}  // namespace iscore::cli
