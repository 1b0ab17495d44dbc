#pragma once

// Closed-loop clock: a noisy local oscillator interrogated once per cycle,
// with the phase estimate fed back to a frequency correction.
//
// Cycle k (dead-time free, period T):
//   phi_true = (lo_offset_k - correction_k) T + phi0
//   x        ~ P(x | phi_true, T)
//   d        = phi_est(x) - phi0
//   integral += integral_gain d / T
//   correction_{k+1} = correction_k + primary_gain d / T + integral
// A heralded discard leaves both the correction and the integrator alone.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ghzclock/lo_noise.hpp"
#include "ghzclock/protocols.hpp"

namespace ghzclock {

struct ServoConfig {
  double primary_gain = 0.3;
  double integral_gain = 2e-4;

  void validate() const;
};

class Servo {
 public:
  explicit Servo(const ServoConfig& cfg);

  /// Correction currently applied to the LO, rad/s.
  [[nodiscard]] double correction() const { return correction_; }
  [[nodiscard]] double integral() const { return integral_; }

  /// Feeds one phase deviation (rad). Returns the change of the correction.
  double update(double deviation, double T, bool discard);

 private:
  ServoConfig cfg_;
  double correction_ = 0.0;
  double integral_ = 0.0;
};

struct CycleRecord {
  double true_phase = 0.0;       ///< rad, includes phi0
  double outcome = 0.0;
  double estimate = 0.0;         ///< rad
  double correction = 0.0;       ///< rad/s applied during this cycle
  double correction_step = 0.0;  ///< rad/s change after this cycle
  double lo_offset = 0.0;        ///< rad/s
};

struct ClockTrace {
  std::vector<CycleRecord> records;
  double period = 0.0;         ///< T
  double working_point = 0.0;  ///< phi0
  double carrier = 1.0;        ///< omega_0
  double fringe_period = 0.0;  ///< phase period of the readout signal
  ProtocolKind kind = ProtocolKind::heralded_ghz;
  int n_atoms = 0;

  [[nodiscard]] std::size_t n_cycles() const { return records.size(); }
  /// y_k = (lo_offset - correction) / omega_0.
  [[nodiscard]] std::vector<double> fractional_frequency() const;
  /// phi_true - phi0 per cycle.
  [[nodiscard]] std::vector<double> tracking_error() const;
  /// Fraction of cycles whose correction step is exactly zero.
  [[nodiscard]] double zero_step_fraction() const;
};

/// Named parameter sets for the ensemble and LO.
struct ClockPreset {
  std::string name;
  double gamma_decay = 0.0;
  double gamma_dephase = 0.0;
  LOModel lo;
};

[[nodiscard]] ClockPreset ca_plus_preset();
[[nodiscard]] ClockPreset generic_preset();
/// "ca+" or "generic"; throws std::invalid_argument otherwise.
[[nodiscard]] ClockPreset preset_by_name(std::string_view name);

[[nodiscard]] ClockTrace run_clock(const ProtocolSpec& spec, const EstimatorSpec& est,
                                   const LOModel& lo, const ServoConfig& servo, double T,
                                   std::size_t n_cycles, std::uint64_t seed);

}  // namespace ghzclock
