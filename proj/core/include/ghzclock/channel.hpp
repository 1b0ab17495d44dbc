#pragma once

// Decoherence during free evolution: individual spontaneous decay (rate
// Gamma) and individual dephasing (rate gamma) on top of the z-rotation
// that imprints the phase.
//
// The oracle path composes exact single-atom Kraus channels. Because the
// generator is a sum of commuting single-atom terms that also commute with
// the collective z-rotation, this composition reproduces the master-equation
// solution exactly:
//   amplitude damping    p = 1 - e^{-Gamma T}
//   phase flip           q = (1 - e^{-gamma T / 2}) / 2
// so a single-atom coherence shrinks by e^{-(Gamma + gamma) T / 2}.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ghzclock/spin.hpp"

namespace ghzclock {

/// Hermitian, unit-trace operator on the 2^N product basis.
class DensityState {
 public:
  /// Checks shape, unit trace and Hermiticity (both to 1e-12). Positivity
  /// is checked separately by is_positive().
  DensityState(int n_atoms, Eigen::MatrixXcd matrix);

  static DensityState from_pure(const PureState& psi);

  [[nodiscard]] int n_atoms() const { return n_atoms_; }
  [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return matrix_; }
  [[nodiscard]] Eigen::Index dimension() const { return matrix_.rows(); }

  [[nodiscard]] double min_eigenvalue() const;
  [[nodiscard]] bool is_positive(double tol = 1e-10) const { return min_eigenvalue() >= -tol; }

 private:
  int n_atoms_;
  Eigen::MatrixXcd matrix_;
};

struct ChannelParams {
  EnsembleParams params;
  double duration = 0.0;  ///< T in seconds
  double phase = 0.0;     ///< phi = omega T in radians

  void validate() const;
};

using KrausPair = std::array<Eigen::Matrix2cd, 2>;

[[nodiscard]] KrausPair amplitude_damping_kraus(double p);
[[nodiscard]] KrausPair phase_flip_kraus(double q);

/// rho -> sum_j K_j rho K_j^dagger with K_j acting on one atom.
void apply_single_atom_kraus(Eigen::MatrixXcd& rho, int atom,
                             std::span<const Eigen::Matrix2cd> kraus);

/// rho -> U rho U^dagger for U = exp(-i phi S_z).
void apply_phase_rotation(Eigen::MatrixXcd& rho, int n_atoms, double phi);

/// Brute-force channel: phase rotation, then per-atom damping and dephasing.
/// Rejects N > kMaxDenseAtoms and states that are not unit-trace Hermitian;
/// positivity is additionally checked for N <= 8.
[[nodiscard]] DensityState evolve_oracle(const DensityState& state, const ChannelParams& cp);

/// The four weights that define the decohered GHZ state, valid for any N.
struct GhzEvolvedBlocks {
  double ground_weight;       ///< weight of |down..><down..| outside the product term (1/2)
  cplx coherence;             ///< coefficient of |down..><up..|
  double excited_keep;        ///< e^{-Gamma T}: per-atom excited population
  double decayed;             ///< 1 - e^{-Gamma T}
};

[[nodiscard]] GhzEvolvedBlocks ghz_evolved_blocks(const ChannelParams& cp);

/// Closed-form evolved GHZ state for (|up..> + |down..>)/sqrt 2.
[[nodiscard]] DensityState evolve_ghz_analytic(const ChannelParams& cp);

/// Decay of S_x/S_y means and the S_y variance under the decoherence part of
/// the channel. The phase rotation is not applied.
[[nodiscard]] SpinMoments evolve_moments(const SpinMoments& initial, const ChannelParams& cp);

/// Tr(S_a rho).
[[nodiscard]] double spin_mean(const DensityState& rho, Axis a);

/// Re Tr(S_a S_b rho).
[[nodiscard]] double spin_second_moment(const DensityState& rho, Axis a, Axis b);

/// Probabilities of the collective S_axis eigenvalues -N/2 .. N/2 (ascending)
/// for a projective measurement in the product eigenbasis of sigma_axis.
[[nodiscard]] std::vector<double> collective_distribution(const DensityState& rho, Axis axis);

/// Single-atom change of basis whose rows are <-|, <+| of sigma_axis, so
/// that afterwards bit 1 of an index marks the +1 eigenvalue.
[[nodiscard]] Eigen::Matrix2cd measurement_basis(Axis axis);

/// U rho U^dagger.
[[nodiscard]] DensityState conjugate(const DensityState& rho, const Eigen::MatrixXcd& u);

}  // namespace ghzclock
