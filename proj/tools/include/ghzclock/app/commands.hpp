#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ghzclock/app/config.hpp"

namespace ghzclock::app {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitVerifyFailed = 2, kExitRuntime = 3 };

struct IdentityCheck {
  std::string identity;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Closed forms against the dense Kraus / eigendecomposition oracle over
/// random (Gamma, gamma, T, phi) draws for N = 1 .. n_max.
[[nodiscard]] std::vector<IdentityCheck> verify_identities(int n_max, int draws,
                                                           std::uint64_t seed);

/// Runs one command and writes its files. Tables go to `out` when no output
/// path is configured; progress and summaries go to `log`. Throws
/// ConfigError for bad input and std::runtime_error for I/O failures.
[[nodiscard]] ExitCode run_command(const RunConfig& config, std::ostream& out, std::ostream& log);

}  // namespace ghzclock::app
