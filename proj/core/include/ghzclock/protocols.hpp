#pragma once

// Ramsey interrogation protocols: outcome statistics, estimators and the
// resulting single-shot phase uncertainty.
//
// Readout conventions
//   css, sss      measure S_y after free evolution; the phase rotates the
//                 mean spin from +x toward +y, working point 0
//   parity_ghz    parity of the readout pulse, outcomes +-1
//   linear_ghz    S_z after U_GHZ^dagger, estimator linear in the outcome
//   heralded_ghz  S_z after U_GHZ^dagger, only x = +-N/2 carry information
// For the GHZ family the working point is pi/(2N), where the fringe is
// steepest.

#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ghzclock/channel.hpp"
#include "ghzclock/spin.hpp"

namespace ghzclock {

enum class ProtocolKind { css, sss, parity_ghz, linear_ghz, heralded_ghz };

[[nodiscard]] std::string_view to_string(ProtocolKind kind);
/// Throws std::invalid_argument for an unknown name.
[[nodiscard]] ProtocolKind parse_protocol_kind(std::string_view name);
[[nodiscard]] bool is_ghz_family(ProtocolKind kind);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::heralded_ghz;
  EnsembleParams params;
  double twist_mu = 0.0;                ///< OAT strength, sss only
  std::optional<double> working_point;  ///< overrides the default phi0

  void validate() const;
  [[nodiscard]] double phi0() const;
  /// Phase period of the readout signal: 2 pi / N for the GHZ family, 2 pi otherwise.
  [[nodiscard]] double fringe_period() const;
};

struct OutcomeDistribution {
  std::vector<double> outcomes;  ///< ascending labels
  std::vector<double> probs;

  [[nodiscard]] double total() const;
  /// Probability of a label, 0 when absent.
  [[nodiscard]] double prob_of(double outcome) const;
  [[nodiscard]] double mean() const;
  [[nodiscard]] double second_moment() const;
};

enum class EstimatorKind { linear, heralded };

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::linear;
  double slope = 1.0;   ///< d<x>/dphi at the working point (linear kind)
  double offset = 0.0;  ///< working point phi0
};

/// Heralded estimator for heralded_ghz, otherwise the linear estimator with
/// the closed-form slope of the protocol at its working point.
[[nodiscard]] EstimatorSpec default_estimator(const ProtocolSpec& spec, double T);

/// Conditional outcome probabilities of the heralded / linear GHZ readout,
/// labels -N/2 .. N/2.
[[nodiscard]] OutcomeDistribution heralded_distribution(const EnsembleParams& params, double phi,
                                                        double T);

/// <Pi> = (-1)^N e^{-(Gamma+gamma) N T / 2} cos(N phi).
[[nodiscard]] double parity_signal(const EnsembleParams& params, double phi, double T);

/// Outcome distribution of any protocol. css is a binomial over independent
/// atoms; sss goes through the dense oracle and is limited to kMaxDenseAtoms.
[[nodiscard]] OutcomeDistribution outcome_distribution(const ProtocolSpec& spec, double phi,
                                                       double T);

/// Throws std::invalid_argument for labels the heralded readout cannot produce.
[[nodiscard]] double estimate_phase(const EstimatorSpec& est, double outcome,
                                    const EnsembleParams& params, double T);

/// True for a heralded-estimator outcome that carries no information.
[[nodiscard]] bool is_discarded(const EstimatorSpec& est, double outcome, int n_atoms);

struct MseResult {
  double delta_phi_sq = 0.0;
  double response_slope = 0.0;   ///< d E[phi_est] / d phi at phi0, should be 1
  bool locally_unbiased = false; ///< |response_slope - 1| <= 1e-6
};

/// Sum_x P(x|phi0) (phi_est(x) - phi0)^2 from the exact outcome distribution.
[[nodiscard]] MseResult phase_uncertainty_mse(const ProtocolSpec& spec, const EstimatorSpec& est,
                                              double T);

/// Closed-form phase variance per protocol.
[[nodiscard]] double phase_uncertainty_closed(const ProtocolSpec& spec, double T);

/// e^{(Gamma+gamma) N T} / (2 N^2) [1 + e^{-Gamma N T} + (1 - e^{-Gamma T})^N].
[[nodiscard]] double ghz_qcrb(const EnsembleParams& params, double T);

/// <x^2> of the S_z outcome after U_GHZ^dagger (phase independent).
[[nodiscard]] double linear_ghz_second_moment(const EnsembleParams& params, double T);

/// Brute-force counterparts of the closed forms, built from the dense
/// state, the Kraus oracle and U_GHZ.
namespace oracle {

/// GHZ prepared as U_GHZ |down..>, evolved, read out with U_GHZ^dagger.
[[nodiscard]] OutcomeDistribution heralded_distribution(const EnsembleParams& params, double phi,
                                                        double T);
/// Tr(rho (-sigma_x)^{(x)N}) on the evolved (|down..> + |up..>)/sqrt 2.
[[nodiscard]] double parity_signal(const EnsembleParams& params, double phi, double T);
/// S_y distribution of the evolved squeezed state.
[[nodiscard]] OutcomeDistribution sss_distribution(const EnsembleParams& params, double mu,
                                                   double phi, double T);

}  // namespace oracle

/// Draws readout outcomes for one protocol at a fixed interrogation time.
///
/// GHZ family and css: inverse-CDF sampling of the exact distribution.
/// sss with N <= kMaxDenseAtoms: quantum-trajectory sampling of the pure
/// state (Kraus branch per atom, then a projective S_y measurement).
/// sss above that: Gaussian S_y readout with the decayed moments.
class OutcomeSampler {
 public:
  OutcomeSampler(const ProtocolSpec& spec, double T);

  [[nodiscard]] double sample(double phi, std::mt19937_64& rng) const;
  [[nodiscard]] const ProtocolSpec& spec() const { return spec_; }

 private:
  [[nodiscard]] double sample_discrete(const OutcomeDistribution& dist, std::mt19937_64& rng) const;
  [[nodiscard]] double sample_trajectory(double phi, std::mt19937_64& rng) const;
  [[nodiscard]] double sample_gaussian(double phi, std::mt19937_64& rng) const;

  ProtocolSpec spec_;
  double duration_;
  std::optional<PureState> squeezed_;
  SpinMoments decayed_;
};

[[nodiscard]] double sample_outcome(const ProtocolSpec& spec, double phi, double T,
                                    std::mt19937_64& rng);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
[[nodiscard]] inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ghzclock
