#pragma once

#include <cstdint>
#include <iosfwd>

namespace freeharness::cli {

/// Seed used when --seed is not given.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kDomain = 3, kNumerical = 4 };

/// Runs one subcommand. Regular output goes to `out` unless --out names a
/// file; diagnostics and usage text go to `err`.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freeharness::cli
