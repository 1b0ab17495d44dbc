#pragma once

// Overlapping Allan deviation and fringe-hop detection on clock traces.

#include <cstddef>
#include <span>
#include <vector>

#include "ghzclock/clock.hpp"

namespace ghzclock {

/// Overlapping Allan deviation of per-cycle fractional frequencies y at
/// averaging factors m (tau = m T). Throws std::invalid_argument when
/// y.size() < 100 m for any m.
[[nodiscard]] std::vector<double> overlapping_adev(std::span<const double> y,
                                                   std::span<const std::size_t> factors);

/// tau = {1, 2, 5, 10, 20, 50, ...} T while n_cycles >= 100 tau / T.
[[nodiscard]] std::vector<double> default_taus(std::size_t n_cycles, double T);

/// Least-squares c in sigma = c / sqrt(tau) over the largest decade of tau.
[[nodiscard]] double fit_white_fm(std::span<const double> taus, std::span<const double> sigma);

struct AllanEstimate {
  std::vector<double> taus;
  std::vector<double> sigma_y;
  double sigma_y_at_1s = 0.0;
  std::size_t hop_count = 0;
};

/// Every tau must be a multiple of the trace period. An empty list selects
/// default_taus.
[[nodiscard]] AllanEstimate allan_deviation(const ClockTrace& trace,
                                            std::span<const double> taus = {});

struct HopReport {
  std::size_t hop_count = 0;
  std::vector<std::size_t> hop_cycles;  ///< first cycle of each newly settled fringe
  long final_fringe = 0;
};

/// Running mean of the tracking error over `window` cycles. A fringe is
/// settled while the mean stays within fringe_period/8 of k * fringe_period
/// for at least `window` cycles; a hop is a change of k between consecutive
/// settled stretches, starting from k = 0. The mean must therefore cross
/// fringe_period/2 to register.
[[nodiscard]] HopReport detect_fringe_hops(std::span<const double> tracking_error,
                                           double fringe_period, std::size_t window = 100);
[[nodiscard]] HopReport detect_fringe_hops(const ClockTrace& trace);

}  // namespace ghzclock
