#include "ghzclock/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace ghzclock {
namespace {

double finite_or_inf(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                               const MinimizeOptions& opts) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
    throw std::invalid_argument("minimize_scalar needs a finite bracket lo < hi");
  }
  if (opts.log_spaced && lo <= 0.0) {
    throw std::invalid_argument("log-spaced bracket needs lo > 0");
  }
  if (opts.grid_points < 3) throw std::invalid_argument("grid_points must be >= 3");

  const auto to_x = [&](double u) { return opts.log_spaced ? std::exp(u) : u; };
  const double u_lo = opts.log_spaced ? std::log(lo) : lo;
  const double u_hi = opts.log_spaced ? std::log(hi) : hi;
  const int g = opts.grid_points;

  MinimizeResult r;
  std::vector<double> us(static_cast<std::size_t>(g));
  std::vector<double> fs(static_cast<std::size_t>(g));
  for (int i = 0; i < g; ++i) {
    const double u = (i == g - 1) ? u_hi : u_lo + (u_hi - u_lo) * i / (g - 1);
    us[static_cast<std::size_t>(i)] = u;
    fs[static_cast<std::size_t>(i)] = finite_or_inf(f(to_x(u)));
  }
  r.evaluations = g;

  std::size_t best = 0;
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  if (!std::isfinite(fs[best])) {
    throw OptimizationError("objective is not finite anywhere on the coarse grid");
  }
  int interior_minima = 0;
  for (std::size_t i = 1; i + 1 < fs.size(); ++i) {
    if (fs[i] <= fs[i - 1] && fs[i] < fs[i + 1]) ++interior_minima;
  }
  if (opts.require_unimodal && interior_minima > 1) {
    throw OptimizationError("objective is not unimodal on the bracket (" +
                            std::to_string(interior_minima) + " coarse-grid minima)");
  }
  r.at_edge = (best == 0 || best + 1 == fs.size());
  if (r.at_edge && !opts.allow_edge) {
    throw OptimizationError("minimum lies on the bracket edge at x = " +
                            std::to_string(to_x(us[best])) +
                            "; the optimum is outside the bracket or unbounded");
  }

  double a = us[best == 0 ? 0 : best - 1];
  double b = us[std::min(best + 1, fs.size() - 1)];
  constexpr double inv_phi = std::numbers::phi - 1.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = finite_or_inf(f(to_x(c)));
  double fd = finite_or_inf(f(to_x(d)));
  r.evaluations += 2;
  const auto tolerance = [&] {
    if (opts.log_spaced) return opts.rel_tol;
    return opts.rel_tol * std::max(0.5 * (std::abs(a) + std::abs(b)), 1e-300);
  };
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (b - a < tolerance()) {
      r.converged = true;
      break;
    }
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = finite_or_inf(f(to_x(c)));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = finite_or_inf(f(to_x(d)));
    }
    ++r.evaluations;
  }
  if (!r.converged && b - a < tolerance()) r.converged = true;

  const double u_ref = fc < fd ? c : d;
  const double f_ref = std::min(fc, fd);
  if (f_ref <= fs[best]) {
    r.x_min = to_x(u_ref);
    r.min_value = f_ref;
  } else {
    r.x_min = to_x(us[best]);
    r.min_value = fs[best];
  }
  return r;
}

MinimizeResult minimize_over_T(const std::function<double(double)>& curve_fn, double t_lo,
                               double t_hi) {
  if (!(t_lo > 0.0)) throw std::invalid_argument("minimize_over_T needs T_lo > 0");
  return minimize_scalar(curve_fn, t_lo, t_hi, MinimizeOptions{});
}

}  // namespace ghzclock
