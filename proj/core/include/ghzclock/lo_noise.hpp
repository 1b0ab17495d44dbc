#pragma once

// Local-oscillator frequency noise, one mean offset (rad/s) per cycle.

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

namespace ghzclock {

enum class LoNoiseKind { flicker, white, none };

[[nodiscard]] std::string_view to_string(LoNoiseKind kind);
[[nodiscard]] LoNoiseKind parse_lo_noise_kind(std::string_view name);

/// Optical clock transition of 40Ca+, 411.042 THz.
inline constexpr double kCaCarrier = 2.0 * std::numbers::pi * 411.042e12;

struct LOModel {
  LoNoiseKind noise_kind = LoNoiseKind::none;
  /// Fractional Allan floor. When > 0 it sets the flicker level directly
  /// (approximate, equal variance per octave); 0 calibrates to coherence_time.
  double flicker_floor = 0.0;
  double coherence_time = 7.5;  ///< Z in s: RMS accumulated phase reaches 1 rad
  double carrier = kCaCarrier;  ///< omega_0 in rad/s

  void validate() const;
};

/// Independent generator for one purpose (LO noise, readout, ...) derived
/// from a user seed.
[[nodiscard]] std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

inline constexpr std::uint64_t kLoStream = 1;
inline constexpr std::uint64_t kReadoutStream = 2;

/// Octave bank used for flicker synthesis: AR(1) processes with corner
/// frequencies 2^j / (n T), j = 0 .. floor(log2 n), each with the same
/// stationary standard deviation.
struct FlickerBank {
  std::vector<double> correlations;  ///< per-cycle AR(1) coefficients
  double octave_std = 0.0;           ///< rad/s
};

/// Throws std::invalid_argument when n_cycles * T spans fewer than 3 octaves.
[[nodiscard]] FlickerBank flicker_bank(const LOModel& model, std::size_t n_cycles, double T);

/// Variance of the sum of m consecutive samples of a unit-variance AR(1).
[[nodiscard]] double ar1_window_variance(double rho, std::size_t m);

[[nodiscard]] std::vector<double> gen_lo_noise(const LOModel& model, std::size_t n_cycles,
                                               double T, std::uint64_t seed);

}  // namespace ghzclock
