#pragma once

// Bracketed scalar minimization: a coarse grid to locate the basin, then
// golden-section refinement between the grid neighbours of the best point.

#include <functional>
#include <stdexcept>

namespace ghzclock {

class OptimizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MinimizeOptions {
  int grid_points = 64;
  bool log_spaced = true;
  double rel_tol = 1e-6;        ///< relative width of the final bracket
  int max_iterations = 200;
  bool require_unimodal = true; ///< more than one interior grid minimum is an error
  bool allow_edge = false;      ///< a grid minimum on a bracket end is an error unless set
};

struct MinimizeResult {
  double x_min = 0.0;
  double min_value = 0.0;
  bool converged = false;
  bool at_edge = false;
  int evaluations = 0;
};

/// Throws OptimizationError for a non-unimodal grid, an edge minimum (when
/// not allowed) or a non-finite objective at the grid minimum.
[[nodiscard]] MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo,
                                             double hi, const MinimizeOptions& opts = {});

/// minimize_scalar with log-spaced grid, unimodality and interior-minimum
/// checks; bracket (T_lo, T_hi) with T_lo > 0.
[[nodiscard]] MinimizeResult minimize_over_T(const std::function<double(double)>& curve_fn,
                                             double t_lo, double t_hi);

}  // namespace ghzclock
