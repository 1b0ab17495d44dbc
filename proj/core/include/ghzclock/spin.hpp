#pragma once

// Collective-spin states and operators on the full 2^N product basis.
//
// Basis convention: bit k of a basis index is the level of atom k, with
// 1 = excited |up> and 0 = ground |down>. Index 0 is the all-ground state.
// The collective S_z eigenvalue of index i is popcount(i) - N/2.

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace ghzclock {

using cplx = std::complex<double>;

/// Largest ensemble for which dense 2^N state vectors and 2^N x 2^N
/// operators are materialized.
inline constexpr int kMaxDenseAtoms = 12;

/// Atom count and single-atom decoherence rates (1/s).
struct EnsembleParams {
  int n_atoms = 1;
  double gamma_decay = 0.0;
  double gamma_dephase = 0.0;

  /// Throws std::invalid_argument when n_atoms < 1 or a rate is negative
  /// or non-finite.
  void validate() const;

  [[nodiscard]] double total_rate() const { return gamma_decay + gamma_dephase; }
};

enum class Axis { x, y, z };
enum class StateKind { ground, css, ghz };

/// Normalized state vector over the 2^N product basis.
class PureState {
 public:
  /// Throws std::invalid_argument on a length mismatch or when the squared
  /// norm deviates from 1 by more than 1e-12.
  PureState(int n_atoms, Eigen::VectorXcd amplitudes);

  [[nodiscard]] int n_atoms() const { return n_atoms_; }
  [[nodiscard]] std::size_t dimension() const {
    return static_cast<std::size_t>(amplitudes_.size());
  }
  [[nodiscard]] const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  [[nodiscard]] cplx operator[](std::size_t i) const {
    return amplitudes_[static_cast<Eigen::Index>(i)];
  }

 private:
  int n_atoms_;
  Eigen::VectorXcd amplitudes_;
};

/// Mean S_x, mean S_y and variance of S_y for a collective spin state.
struct SpinMoments {
  double mean_sx = 0.0;
  double mean_sy = 0.0;
  double var_sy = 0.0;
};

[[nodiscard]] std::size_t basis_dimension(int n_atoms);
[[nodiscard]] double sz_eigenvalue(int n_atoms, std::size_t index);

/// Single-atom Pauli matrix in the (down, up) ordering.
[[nodiscard]] Eigen::Matrix2cd pauli(Axis axis);

[[nodiscard]] PureState build_state(StateKind kind, int n_atoms);

/// exp(-i (mu/2) S_axis^2). Only x and z axes are supported.
[[nodiscard]] PureState apply_oat(const PureState& state, double mu, Axis axis);

/// exp(-i theta S_axis), applied as a product of single-atom rotations.
[[nodiscard]] PureState apply_rotation(const PureState& state, double theta, Axis axis);

/// The readout unitary: T_x(pi) for even N, R_x(pi/2) T_x(pi) for odd N.
/// Assembled column by column from the gate sequence.
[[nodiscard]] Eigen::MatrixXcd u_ghz(int n_atoms);

/// (1/sqrt 2) e^{-i pi/(4E)} [1 + i^{N+E} sigma_x^{(x)N}], E = 1 (N even), 2 (N odd).
[[nodiscard]] Eigen::MatrixXcd u_ghz_closed_form(int n_atoms);

/// Closed-form moments of the one-axis-twisted coherent spin state with
/// the squeezed quadrature aligned to y.
[[nodiscard]] SpinMoments sss_moments(int n_atoms, double mu);
[[nodiscard]] SpinMoments css_moments(int n_atoms);

/// CSS along +x, twisted by exp(-i (mu/2) S_z^2), then rotated about x so
/// that the minimum-variance direction in the y-z plane lies along y.
[[nodiscard]] PureState build_sss_state(int n_atoms, double mu);

/// |<a|b>|, i.e. overlap modulo global phase.
[[nodiscard]] double fidelity(const PureState& a, const PureState& b);

// Low-level kernels shared by the state, channel and sampling code.
namespace kernels {

/// In-place single-atom gate on a 2^N vector.
void apply_single_atom(Eigen::VectorXcd& psi, int atom, const Eigen::Matrix2cd& gate);

/// In-place gate on every atom.
void apply_all_atoms(Eigen::VectorXcd& psi, int n_atoms, const Eigen::Matrix2cd& gate);

/// Returns S_axis |psi>.
[[nodiscard]] Eigen::VectorXcd apply_collective_spin(const Eigen::VectorXcd& psi,
                                                     int n_atoms, Axis axis);

/// Returns S_axis * M, treating M column by column.
[[nodiscard]] Eigen::MatrixXcd apply_collective_spin_left(const Eigen::MatrixXcd& m,
                                                          int n_atoms, Axis axis);

}  // namespace kernels

/// <psi|S_a|psi>.
[[nodiscard]] double spin_mean(const PureState& state, Axis a);

/// Re <psi| (S_a S_b + S_b S_a)/2 |psi>.
[[nodiscard]] double spin_second_moment(const PureState& state, Axis a, Axis b);

}  // namespace ghzclock
