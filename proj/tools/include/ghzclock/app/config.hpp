#pragma once

// Run configuration for the command-line tool.
//
// Values come from three layers, later ones winning: a named preset, a flat
// "key = value" file, and command-line flags. Every run writes the resolved
// values back out in the same file format so it can be replayed with
// --config.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ghzclock/clock.hpp"
#include "ghzclock/protocols.hpp"

namespace ghzclock::app {

/// Bad or missing configuration value. The message names the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { sweep, clock, bounds, verify };

[[nodiscard]] std::string_view to_string(Command c);
[[nodiscard]] Command parse_command(std::string_view name);

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Parses "key = value" lines. '#' starts a comment, values may be quoted,
/// [section] headers are ignored. Throws ConfigError with the line number.
[[nodiscard]] KeyValues parse_key_values(std::string_view text, std::string_view origin = "config");
[[nodiscard]] KeyValues read_config_file(const std::filesystem::path& path);

struct RunConfig {
  Command command = Command::verify;
  std::string preset = "generic";

  // ensemble
  std::vector<ProtocolKind> protocols{ProtocolKind::heralded_ghz};
  int n_atoms = 4;
  int n_lo = 2;
  int n_hi = 10;
  double gamma_decay = 1.0;
  double gamma_dephase = 0.0;
  std::optional<double> twist_mu;  ///< sss clock runs; optimized at T when unset

  // clock
  double T = 0.1;
  std::size_t cycles = 100'000;
  std::size_t runs = 10;
  bool full_scale = false;  ///< 10^7 cycles per run
  std::vector<double> taus;  ///< empty selects the default 1-2-5 ladder
  bool write_trace = false;
  LOModel lo;
  ServoConfig servo;

  // bounds
  double tau = 1.0;

  // verify
  int verify_n_max = 6;
  int verify_draws = 50;

  std::optional<std::uint64_t> seed;
  std::filesystem::path out;  ///< empty writes tables to stdout

  /// Cycles actually run, honouring full_scale.
  [[nodiscard]] std::size_t effective_cycles() const;
  [[nodiscard]] EnsembleParams params(int n) const { return {n, gamma_decay, gamma_dephase}; }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

inline constexpr std::uint64_t kDefaultVerifySeed = 20240601;
inline constexpr std::size_t kFullScaleCycles = 10'000'000;

/// Applies the preset named in `values` (or generic), then every other key.
/// Unknown keys are errors. Throws ConfigError.
[[nodiscard]] RunConfig resolve_config(Command command, const KeyValues& values);

/// Resolved configuration in the file format accepted by parse_key_values.
[[nodiscard]] std::string manifest(const RunConfig& config);

}  // namespace ghzclock::app
