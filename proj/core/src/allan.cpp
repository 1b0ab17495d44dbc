#include "ghzclock/allan.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ghzclock {

std::vector<double> overlapping_adev(std::span<const double> y,
                                     std::span<const std::size_t> factors) {
  const std::size_t n = y.size();
  // Phase in units of T: x_0 = 0, x_{i+1} = x_i + y_i.
  std::vector<long double> x(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) x[i + 1] = x[i] + y[i];

  std::vector<double> out;
  out.reserve(factors.size());
  for (std::size_t m : factors) {
    if (m == 0 || n < 100 * m) {
      throw std::invalid_argument("Allan deviation at tau = " + std::to_string(m) +
                                  " T needs at least " + std::to_string(100 * m) +
                                  " cycles, trace has " + std::to_string(n));
    }
    long double acc = 0.0L;
    const std::size_t terms = n - 2 * m + 1;
    for (std::size_t i = 0; i < terms; ++i) {
      const long double d = x[i + 2 * m] - 2.0L * x[i + m] + x[i];
      acc += d * d;
    }
    const long double md = static_cast<long double>(m);
    out.push_back(static_cast<double>(std::sqrt(acc / (2.0L * md * md * terms))));
  }
  return out;
}

std::vector<double> default_taus(std::size_t n_cycles, double T) {
  std::vector<double> taus;
  constexpr std::size_t steps[] = {1, 2, 5};
  for (std::size_t decade = 1;; decade *= 10) {
    for (std::size_t s : steps) {
      const std::size_t m = s * decade;
      if (n_cycles < 100 * m) return taus;
      taus.push_back(static_cast<double>(m) * T);
    }
  }
}

double fit_white_fm(std::span<const double> taus, std::span<const double> sigma) {
  if (taus.empty() || taus.size() != sigma.size()) {
    throw std::invalid_argument("fit_white_fm needs matching, non-empty tau and sigma lists");
  }
  const double tau_max = taus.back();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (taus[i] < 0.1 * tau_max * (1.0 - 1e-12)) continue;
    num += sigma[i] / std::sqrt(taus[i]);
    den += 1.0 / taus[i];
  }
  return num / den;
}

AllanEstimate allan_deviation(const ClockTrace& trace, std::span<const double> taus) {
  const double T = trace.period;
  if (!(T > 0.0)) throw std::invalid_argument("trace period must be > 0");
  AllanEstimate est;
  est.taus = taus.empty() ? default_taus(trace.n_cycles(), T)
                          : std::vector<double>(taus.begin(), taus.end());
  if (est.taus.empty()) {
    throw std::invalid_argument("trace too short for any Allan deviation (" +
                                std::to_string(trace.n_cycles()) + " cycles)");
  }
  std::vector<std::size_t> factors;
  for (std::size_t i = 0; i < est.taus.size(); ++i) {
    const double ratio = est.taus[i] / T;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
      throw std::invalid_argument("tau = " + std::to_string(est.taus[i]) +
                                  " s is not a multiple of T = " + std::to_string(T));
    }
    if (i > 0 && !(est.taus[i] > est.taus[i - 1])) {
      throw std::invalid_argument("taus must be strictly increasing");
    }
    factors.push_back(static_cast<std::size_t>(rounded));
  }
  const std::vector<double> y = trace.fractional_frequency();
  est.sigma_y = overlapping_adev(y, factors);
  est.sigma_y_at_1s = fit_white_fm(est.taus, est.sigma_y);
  est.hop_count = detect_fringe_hops(trace).hop_count;
  return est;
}

HopReport detect_fringe_hops(std::span<const double> tracking_error, double fringe_period,
                             std::size_t window) {
  if (!(fringe_period > 0.0)) throw std::invalid_argument("fringe_period must be > 0");
  if (window == 0) throw std::invalid_argument("window must be >= 1");
  HopReport report;
  const std::size_t n = tracking_error.size();
  if (n < window) return report;

  std::vector<long double> prefix(n + 1, 0.0L);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + tracking_error[i];

  long current = 0;
  bool in_run = false;
  long run_fringe = 0;
  std::size_t run_start = 0;
  std::size_t run_length = 0;
  bool run_counted = false;
  for (std::size_t k = window - 1; k < n; ++k) {
    const double mean =
        static_cast<double>((prefix[k + 1] - prefix[k + 1 - window]) / static_cast<long double>(window));
    const double cycles = mean / fringe_period;
    const long fringe = std::lround(cycles);
    const bool settled = std::abs(cycles - static_cast<double>(fringe)) <= 0.125;
    if (!settled) {
      in_run = false;
      continue;
    }
    if (!in_run || fringe != run_fringe) {
      in_run = true;
      run_fringe = fringe;
      run_start = k;
      run_length = 0;
      run_counted = false;
    }
    ++run_length;
    if (!run_counted && run_length >= window) {
      run_counted = true;
      if (run_fringe != current) {
        ++report.hop_count;
        report.hop_cycles.push_back(run_start);
        current = run_fringe;
      }
    }
  }
  report.final_fringe = current;
  return report;
}

HopReport detect_fringe_hops(const ClockTrace& trace) {
  const std::vector<double> e = trace.tracking_error();
  return detect_fringe_hops(e, trace.fringe_period);
}

}  // namespace ghzclock
