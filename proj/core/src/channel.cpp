#include "ghzclock/channel.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace ghzclock {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kPositivityCheckMaxAtoms = 8;

}  // namespace

Eigen::Matrix2cd measurement_basis(Axis axis) {
  const double s = 1.0 / std::numbers::sqrt2;
  Eigen::Matrix2cd w;
  switch (axis) {
    case Axis::x:
      w << s, -s, s, s;
      break;
    case Axis::y:
      w << s, -kI * s, s, kI * s;
      break;
    case Axis::z:
      w.setIdentity();
      break;
  }
  return w;
}

DensityState::DensityState(int n_atoms, Eigen::MatrixXcd matrix)
    : n_atoms_(n_atoms), matrix_(std::move(matrix)) {
  if (n_atoms < 1 || n_atoms > kMaxDenseAtoms) {
    throw std::invalid_argument("density states are limited to 1 <= N <= " +
                                std::to_string(kMaxDenseAtoms));
  }
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n_atoms));
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw std::invalid_argument("density matrix shape does not match 2^N");
  }
  const cplx tr = matrix_.trace();
  if (std::abs(tr - cplx{1.0, 0.0}) > 1e-12) {
    throw std::invalid_argument("density matrix trace deviates from 1");
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = i; j < dim; ++j) {
      if (std::abs(matrix_(i, j) - std::conj(matrix_(j, i))) > 1e-12) {
        throw std::invalid_argument("density matrix is not Hermitian");
      }
    }
  }
}

DensityState DensityState::from_pure(const PureState& psi) {
  const Eigen::VectorXcd& a = psi.amplitudes();
  return DensityState(psi.n_atoms(), a * a.adjoint());
}

double DensityState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void ChannelParams::validate() const {
  params.validate();
  if (!std::isfinite(duration) || duration < 0.0) {
    throw std::invalid_argument("channel duration must be finite and >= 0");
  }
  if (!std::isfinite(phase)) {
    throw std::invalid_argument("channel phase must be finite");
  }
}

KrausPair amplitude_damping_kraus(double p) {
  KrausPair k;
  k[0] << 1.0, 0.0, 0.0, std::sqrt(1.0 - p);
  k[1] << 0.0, std::sqrt(p), 0.0, 0.0;
  return k;
}

KrausPair phase_flip_kraus(double q) {
  KrausPair k;
  k[0] = std::sqrt(1.0 - q) * Eigen::Matrix2cd::Identity();
  k[1] = std::sqrt(q) * pauli(Axis::z);
  return k;
}

void apply_single_atom_kraus(Eigen::MatrixXcd& rho, int atom,
                             std::span<const Eigen::Matrix2cd> kraus) {
  const auto mask = Eigen::Index{1} << atom;
  const Eigen::Index dim = rho.rows();
  Eigen::Matrix2cd block;
  Eigen::Matrix2cd out;
  for (Eigen::Index j = 0; j < dim; ++j) {
    if ((j & mask) != 0) continue;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if ((i & mask) != 0) continue;
      block << rho(i, j), rho(i, j | mask), rho(i | mask, j), rho(i | mask, j | mask);
      out.setZero();
      for (const auto& k : kraus) out.noalias() += k * block * k.adjoint();
      rho(i, j) = out(0, 0);
      rho(i, j | mask) = out(0, 1);
      rho(i | mask, j) = out(1, 0);
      rho(i | mask, j | mask) = out(1, 1);
    }
  }
}

void apply_phase_rotation(Eigen::MatrixXcd& rho, int n_atoms, double phi) {
  const Eigen::Index dim = rho.rows();
  Eigen::VectorXcd phases(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    phases[i] = std::exp(-kI * phi * sz_eigenvalue(n_atoms, static_cast<std::size_t>(i)));
  }
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      rho(i, j) *= phases[i] * std::conj(phases[j]);
    }
  }
}

DensityState evolve_oracle(const DensityState& state, const ChannelParams& cp) {
  cp.validate();
  if (cp.params.n_atoms != state.n_atoms()) {
    throw std::invalid_argument("channel atom number does not match the state");
  }
  if (state.n_atoms() <= kPositivityCheckMaxAtoms && !state.is_positive()) {
    throw std::invalid_argument("input density matrix has negative eigenvalues");
  }
  const int n = state.n_atoms();
  Eigen::MatrixXcd rho = state.matrix();
  apply_phase_rotation(rho, n, cp.phase);

  const double t = cp.duration;
  const double p_decay = -std::expm1(-cp.params.gamma_decay * t);
  const double q_flip = -0.5 * std::expm1(-0.5 * cp.params.gamma_dephase * t);
  const KrausPair damping = amplitude_damping_kraus(p_decay);
  const KrausPair dephasing = phase_flip_kraus(q_flip);
  for (int k = 0; k < n; ++k) {
    if (p_decay > 0.0) apply_single_atom_kraus(rho, k, damping);
    if (q_flip > 0.0) apply_single_atom_kraus(rho, k, dephasing);
  }
  // Remove rounding-level anti-Hermitian residue.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityState(n, std::move(rho));
}

GhzEvolvedBlocks ghz_evolved_blocks(const ChannelParams& cp) {
  cp.validate();
  const double n = cp.params.n_atoms;
  const double t = cp.duration;
  GhzEvolvedBlocks b{};
  b.ground_weight = 0.5;
  b.coherence = 0.5 * std::exp(-0.5 * cp.params.total_rate() * n * t) *
                std::exp(kI * cp.phase * n);
  b.excited_keep = std::exp(-cp.params.gamma_decay * t);
  b.decayed = -std::expm1(-cp.params.gamma_decay * t);
  return b;
}

DensityState evolve_ghz_analytic(const ChannelParams& cp) {
  const GhzEvolvedBlocks b = ghz_evolved_blocks(cp);
  const int n = cp.params.n_atoms;
  if (n > kMaxDenseAtoms) {
    throw std::invalid_argument("evolve_ghz_analytic materializes at most " +
                                std::to_string(kMaxDenseAtoms) + " atoms; use ghz_evolved_blocks");
  }
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n));
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  rho(0, 0) += b.ground_weight;
  rho(0, dim - 1) += b.coherence;
  rho(dim - 1, 0) += std::conj(b.coherence);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const int up = std::popcount(static_cast<std::size_t>(i));
    rho(i, i) += 0.5 * std::pow(b.excited_keep, up) * std::pow(b.decayed, n - up);
  }
  return DensityState(n, std::move(rho));
}

SpinMoments evolve_moments(const SpinMoments& initial, const ChannelParams& cp) {
  cp.validate();
  const double n = cp.params.n_atoms;
  const double contrast = std::exp(-0.5 * cp.params.total_rate() * cp.duration);
  const double c2 = contrast * contrast;
  const double second = initial.var_sy + initial.mean_sy * initial.mean_sy;
  SpinMoments out;
  out.mean_sx = contrast * initial.mean_sx;
  out.mean_sy = contrast * initial.mean_sy;
  const double second_t = 0.25 * n * (1.0 - c2) + c2 * second;
  out.var_sy = second_t - out.mean_sy * out.mean_sy;
  return out;
}

double spin_mean(const DensityState& rho, Axis a) {
  return kernels::apply_collective_spin_left(rho.matrix(), rho.n_atoms(), a).trace().real();
}

double spin_second_moment(const DensityState& rho, Axis a, Axis b) {
  const Eigen::MatrixXcd sb = kernels::apply_collective_spin_left(rho.matrix(), rho.n_atoms(), b);
  return kernels::apply_collective_spin_left(sb, rho.n_atoms(), a).trace().real();
}

std::vector<double> collective_distribution(const DensityState& rho, Axis axis) {
  const int n = rho.n_atoms();
  Eigen::MatrixXcd m = rho.matrix();
  if (axis != Axis::z) {
    const Eigen::Matrix2cd w = measurement_basis(axis);
    const std::array<Eigen::Matrix2cd, 1> basis_change{w};
    for (int k = 0; k < n; ++k) apply_single_atom_kraus(m, k, basis_change);
  }
  std::vector<double> probs(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    probs[static_cast<std::size_t>(std::popcount(static_cast<std::size_t>(i)))] += m(i, i).real();
  }
  for (double& p : probs) p = std::max(p, 0.0);
  return probs;
}

DensityState conjugate(const DensityState& rho, const Eigen::MatrixXcd& u) {
  Eigen::MatrixXcd out = u * rho.matrix() * u.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityState(rho.n_atoms(), std::move(out));
}

}  // namespace ghzclock
