#pragma once

// Bounds on the phase and frequency uncertainty, conversion between the
// two, and optimization over interrogation time (and twisting strength).
//
// Frequency costs are reported as Delta omega^2 * tau = Delta phi^2 / T,
// which is independent of the total averaging time tau.

#include <span>
#include <vector>

#include "ghzclock/channel.hpp"
#include "ghzclock/optimize.hpp"
#include "ghzclock/protocols.hpp"

namespace ghzclock {

/// 2 sum_{k,l} (l_k - l_l)^2 / (l_k + l_l) |<k|S_z|l>|^2 over the full
/// eigendecomposition, skipping pairs with l_k + l_l <= 1e-12.
[[nodiscard]] double qfi_numeric(const DensityState& state);

/// 2 N^2 e^{-(Gamma+gamma) N T} / [1 + (1 - e^{-Gamma T})^N + e^{-Gamma N T}].
[[nodiscard]] double qfi_ghz_closed(const EnsembleParams& params, double T);

/// Delta omega^2 = Delta phi^2 / (T tau). Throws std::domain_error unless T, tau > 0.
[[nodiscard]] double freq_variance(double delta_phi_sq, double T, double tau);

/// e (Gamma+gamma) / (N tau).
[[nodiscard]] double sql_freq_variance(const EnsembleParams& params, double tau);

struct SssOptimum {
  double mu_opt = 0.0;
  double delta_phi_sq = 0.0;
};

/// Minimizes the method-of-moments phase variance over mu in (0, pi].
[[nodiscard]] SssOptimum optimize_sss(const EnsembleParams& params, double T);

/// Delta phi^2(T) / T for a protocol. sss uses the optimal twist at each T
/// when `optimize_twist` is set, otherwise spec.twist_mu.
[[nodiscard]] double freq_cost(const ProtocolSpec& spec, double T, bool optimize_twist = true);

/// [1e-3 / (N (Gamma+gamma)), 10 / (Gamma+gamma)]. Throws OptimizationError
/// when Gamma + gamma = 0 (the optimum is unbounded).
[[nodiscard]] std::pair<double, double> default_T_bracket(const EnsembleParams& params);

struct CurveSample {
  double T = 0.0;
  double delta_phi_sq = 0.0;
  double freq_var_tau = 0.0;  ///< Delta omega^2 * tau in 1/s
};

struct SensitivityCurve {
  ProtocolSpec protocol;
  std::vector<CurveSample> samples;
  double t_min = 0.0;
  double min_freq_var = 0.0;  ///< minimal Delta omega^2 * tau
  double mu_opt = 0.0;        ///< optimal twist at t_min (sss only)
  bool converged = false;
};

/// Log-spaced samples across the default bracket plus the optimizer result.
[[nodiscard]] SensitivityCurve sensitivity_curve(const ProtocolSpec& protocol,
                                                 std::size_t n_samples = 64);

struct SweepEntry {
  int n_atoms = 0;
  ProtocolKind kind = ProtocolKind::css;
  double t_min = 0.0;
  double mu_opt = 0.0;  ///< 0 unless sss
  double ratio = 0.0;   ///< Delta omega_min / Delta omega_SQL
  bool converged = false;
};

/// One entry per (N, protocol) for N in [n_lo, n_hi], ordered by N and then
/// by the order of `kinds`. sss is skipped for N < 2. Entries are computed
/// on a worker pool (0 = worker_count()).
[[nodiscard]] std::vector<SweepEntry> sweep_vs_N(std::span<const ProtocolKind> kinds, int n_lo,
                                                 int n_hi, double gamma_decay,
                                                 double gamma_dephase = 0.0,
                                                 std::size_t workers = 0);

struct BoundSet {
  double sql = 0.0;           ///< e (Gamma+gamma) / (N tau)
  double asymptotic = 0.0;    ///< (Gamma+gamma) / (N tau)
  double ghz_qcrb_min = 0.0;  ///< min_T of the GHZ QCRB / (T tau)
  double ghz_t_min = 0.0;
};

[[nodiscard]] BoundSet bounds(const EnsembleParams& params, double tau);

}  // namespace ghzclock
