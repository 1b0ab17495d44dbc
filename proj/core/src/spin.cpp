#include "ghzclock/spin.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ghzclock {
namespace {

constexpr cplx kI{0.0, 1.0};

void require_atoms(int n_atoms, int min_atoms = 1) {
  if (n_atoms < min_atoms) {
    throw std::invalid_argument("n_atoms must be >= " + std::to_string(min_atoms) +
                                ", got " + std::to_string(n_atoms));
  }
  if (n_atoms > kMaxDenseAtoms) {
    throw std::invalid_argument("n_atoms = " + std::to_string(n_atoms) +
                                " exceeds the dense-state limit of " +
                                std::to_string(kMaxDenseAtoms));
  }
}

cplx i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  const double s = 1.0 / std::numbers::sqrt2;
  h << s, s, s, -s;
  return h;
}

Eigen::Matrix2cd single_atom_rotation(double theta, Axis axis) {
  return std::cos(theta / 2.0) * Eigen::Matrix2cd::Identity() -
         kI * std::sin(theta / 2.0) * pauli(axis);
}

void twist_z(Eigen::VectorXcd& psi, int n_atoms, double mu) {
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double m = sz_eigenvalue(n_atoms, static_cast<std::size_t>(i));
    psi[i] *= std::exp(-kI * (mu / 2.0) * m * m);
  }
}

void twist(Eigen::VectorXcd& psi, int n_atoms, double mu, Axis axis) {
  switch (axis) {
    case Axis::z:
      twist_z(psi, n_atoms, mu);
      return;
    case Axis::x: {
      // H^{(x)N} S_z^2 H^{(x)N} = S_x^2
      const Eigen::Matrix2cd h = hadamard();
      kernels::apply_all_atoms(psi, n_atoms, h);
      twist_z(psi, n_atoms, mu);
      kernels::apply_all_atoms(psi, n_atoms, h);
      return;
    }
    case Axis::y:
      break;
  }
  throw std::invalid_argument("one-axis twisting is only defined about x or z");
}

void readout_gates(Eigen::VectorXcd& psi, int n_atoms) {
  twist(psi, n_atoms, std::numbers::pi, Axis::x);
  if (n_atoms % 2 == 1) {
    kernels::apply_all_atoms(psi, n_atoms, single_atom_rotation(std::numbers::pi / 2.0, Axis::x));
  }
}

}  // namespace

void EnsembleParams::validate() const {
  if (n_atoms < 1) {
    throw std::invalid_argument("n_atoms must be >= 1, got " + std::to_string(n_atoms));
  }
  if (!std::isfinite(gamma_decay) || gamma_decay < 0.0) {
    throw std::invalid_argument("gamma_decay must be finite and >= 0");
  }
  if (!std::isfinite(gamma_dephase) || gamma_dephase < 0.0) {
    throw std::invalid_argument("gamma_dephase must be finite and >= 0");
  }
}

PureState::PureState(int n_atoms, Eigen::VectorXcd amplitudes)
    : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {
  require_atoms(n_atoms);
  if (static_cast<std::size_t>(amplitudes_.size()) != basis_dimension(n_atoms)) {
    throw std::invalid_argument("amplitude vector length does not match 2^N");
  }
  const double norm2 = amplitudes_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw std::invalid_argument("state is not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
}

std::size_t basis_dimension(int n_atoms) { return std::size_t{1} << n_atoms; }

double sz_eigenvalue(int n_atoms, std::size_t index) {
  return static_cast<double>(std::popcount(index)) - 0.5 * n_atoms;
}

Eigen::Matrix2cd pauli(Axis axis) {
  Eigen::Matrix2cd s;
  switch (axis) {
    case Axis::x:
      s << 0.0, 1.0, 1.0, 0.0;
      break;
    case Axis::y:
      // sigma_y |down> = -i |up>, sigma_y |up> = i |down>
      s << cplx{0.0, 0.0}, kI, -kI, cplx{0.0, 0.0};
      break;
    case Axis::z:
      s << -1.0, 0.0, 0.0, 1.0;
      break;
  }
  return s;
}

PureState build_state(StateKind kind, int n_atoms) {
  require_atoms(n_atoms);
  const std::size_t dim = basis_dimension(n_atoms);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  switch (kind) {
    case StateKind::ground:
      psi[0] = 1.0;
      break;
    case StateKind::css:
      psi.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
      break;
    case StateKind::ghz:
      psi[0] = 1.0 / std::numbers::sqrt2;
      psi[static_cast<Eigen::Index>(dim - 1)] = 1.0 / std::numbers::sqrt2;
      break;
  }
  return PureState(n_atoms, std::move(psi));
}

PureState apply_oat(const PureState& state, double mu, Axis axis) {
  Eigen::VectorXcd psi = state.amplitudes();
  twist(psi, state.n_atoms(), mu, axis);
  return PureState(state.n_atoms(), std::move(psi));
}

PureState apply_rotation(const PureState& state, double theta, Axis axis) {
  Eigen::VectorXcd psi = state.amplitudes();
  kernels::apply_all_atoms(psi, state.n_atoms(), single_atom_rotation(theta, axis));
  return PureState(state.n_atoms(), std::move(psi));
}

Eigen::MatrixXcd u_ghz(int n_atoms) {
  require_atoms(n_atoms);
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n_atoms));
  Eigen::MatrixXcd u(dim, dim);
  Eigen::VectorXcd column(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    column.setZero();
    column[j] = 1.0;
    readout_gates(column, n_atoms);
    u.col(j) = column;
  }
  return u;
}

Eigen::MatrixXcd u_ghz_closed_form(int n_atoms) {
  require_atoms(n_atoms);
  const int e = (n_atoms % 2 == 0) ? 1 : 2;
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n_atoms));
  const Eigen::Index all_flipped = dim - 1;
  const cplx prefactor = std::exp(-kI * std::numbers::pi / (4.0 * e)) / std::numbers::sqrt2;
  const cplx flip_weight = i_power(n_atoms + e);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    u(j, j) += prefactor;
    u(j ^ all_flipped, j) += prefactor * flip_weight;
  }
  return u;
}

SpinMoments css_moments(int n_atoms) {
  if (n_atoms < 1) throw std::invalid_argument("n_atoms must be >= 1");
  return {0.5 * n_atoms, 0.0, 0.25 * n_atoms};
}

SpinMoments sss_moments(int n_atoms, double mu) {
  if (n_atoms < 2) {
    throw std::invalid_argument("squeezed states need n_atoms >= 2");
  }
  const double n = n_atoms;
  const double a = 1.0 - std::pow(std::cos(mu), n - 2.0);
  const double b = 4.0 * std::sin(mu / 2.0) * std::pow(std::cos(mu / 2.0), n - 2.0);
  SpinMoments m;
  m.mean_sx = 0.5 * n * std::pow(std::cos(mu / 2.0), n - 1.0);
  m.mean_sy = 0.0;
  m.var_sy = 0.25 * n * (1.0 + 0.25 * (n - 1.0) * (a - std::hypot(a, b)));
  return m;
}

PureState build_sss_state(int n_atoms, double mu) {
  if (n_atoms < 2) {
    throw std::invalid_argument("squeezed states need n_atoms >= 2");
  }
  const PureState twisted = apply_oat(build_state(StateKind::css, n_atoms), mu, Axis::z);
  const double vyy = spin_second_moment(twisted, Axis::y, Axis::y);
  const double vzz = spin_second_moment(twisted, Axis::z, Axis::z);
  const double vyz = spin_second_moment(twisted, Axis::y, Axis::z);
  const double theta = 0.5 * std::atan2(vyz, -(vyy - vzz) / 2.0);

  // The sign of the Heisenberg-picture rotation is settled by evaluation.
  PureState plus = apply_rotation(twisted, theta, Axis::x);
  PureState minus = apply_rotation(twisted, -theta, Axis::x);
  return spin_second_moment(plus, Axis::y, Axis::y) <= spin_second_moment(minus, Axis::y, Axis::y)
             ? plus
             : minus;
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.n_atoms() != b.n_atoms()) {
    throw std::invalid_argument("fidelity between states of different atom number");
  }
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

double spin_mean(const PureState& state, Axis a) {
  const Eigen::VectorXcd s = kernels::apply_collective_spin(state.amplitudes(), state.n_atoms(), a);
  return state.amplitudes().dot(s).real();
}

double spin_second_moment(const PureState& state, Axis a, Axis b) {
  const Eigen::VectorXcd sa = kernels::apply_collective_spin(state.amplitudes(), state.n_atoms(), a);
  const Eigen::VectorXcd sb = kernels::apply_collective_spin(state.amplitudes(), state.n_atoms(), b);
  // <S_a S_b> = <S_a psi | S_b psi>; the symmetrized product is its real part.
  return sa.dot(sb).real();
}

namespace kernels {

void apply_single_atom(Eigen::VectorXcd& psi, int atom, const Eigen::Matrix2cd& gate) {
  const auto mask = Eigen::Index{1} << atom;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if ((i & mask) != 0) continue;
    const cplx down = psi[i];
    const cplx up = psi[i | mask];
    psi[i] = gate(0, 0) * down + gate(0, 1) * up;
    psi[i | mask] = gate(1, 0) * down + gate(1, 1) * up;
  }
}

void apply_all_atoms(Eigen::VectorXcd& psi, int n_atoms, const Eigen::Matrix2cd& gate) {
  for (int k = 0; k < n_atoms; ++k) apply_single_atom(psi, k, gate);
}

Eigen::VectorXcd apply_collective_spin(const Eigen::VectorXcd& psi, int n_atoms, Axis axis) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  if (axis == Axis::z) {
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      out[i] = sz_eigenvalue(n_atoms, static_cast<std::size_t>(i)) * psi[i];
    }
    return out;
  }
  const Eigen::Matrix2cd half_sigma = 0.5 * pauli(axis);
  for (int k = 0; k < n_atoms; ++k) {
    Eigen::VectorXcd term = psi;
    apply_single_atom(term, k, half_sigma);
    out += term;
  }
  return out;
}

Eigen::MatrixXcd apply_collective_spin_left(const Eigen::MatrixXcd& m, int n_atoms, Axis axis) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out.col(c) = apply_collective_spin(m.col(c), n_atoms, axis);
  }
  return out;
}

}  // namespace kernels
}  // namespace ghzclock
