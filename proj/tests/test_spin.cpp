#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "ghzclock/spin.hpp"

using namespace ghzclock;

namespace {

// Removes the global phase that best aligns b with a, then returns max |a - b|.
double max_diff_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  const cplx phase = a(r, c) / b(r, c);
  return (a - phase * b).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd dense_collective(int n, Axis axis) {
  const auto dim = static_cast<Eigen::Index>(basis_dimension(n));
  return kernels::apply_collective_spin_left(Eigen::MatrixXcd::Identity(dim, dim), n, axis);
}

// exp(-i H) for Hermitian H via eigendecomposition.
Eigen::MatrixXcd unitary_from(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases[i] = std::exp(cplx{0.0, -es.eigenvalues()[i]});
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

TEST_CASE("build_state kinds") {
  const PureState g = build_state(StateKind::ground, 1);
  CHECK(g[0] == cplx{1.0, 0.0});
  CHECK(g[1] == cplx{0.0, 0.0});

  const PureState ghz = build_state(StateKind::ghz, 2);
  CHECK(std::abs(ghz[0] - 1.0 / std::numbers::sqrt2) < 1e-15);
  CHECK(std::abs(ghz[1]) == 0.0);
  CHECK(std::abs(ghz[2]) == 0.0);
  CHECK(std::abs(ghz[3] - 1.0 / std::numbers::sqrt2) < 1e-15);

  const PureState css = build_state(StateKind::css, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(css[i] - 0.5) < 1e-15);

  CHECK_THROWS_AS((void)build_state(StateKind::css, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)build_state(StateKind::css, -3), std::invalid_argument);
}

TEST_CASE("pure state rejects bad norm and length") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v[0] = 1.0 + 1e-9;
  CHECK_THROWS_AS(PureState(2, v), std::invalid_argument);
  CHECK_THROWS_AS(PureState(3, Eigen::VectorXcd::Ones(4) * 0.5), std::invalid_argument);
}

TEST_CASE("ensemble params validation") {
  CHECK_NOTHROW(EnsembleParams{1, 0.0, 0.0}.validate());
  CHECK_THROWS(EnsembleParams{0, 1.0, 0.0}.validate());
  CHECK_THROWS(EnsembleParams{2, -1.0, 0.0}.validate());
  CHECK_THROWS(EnsembleParams{2, 1.0, std::nan("")}.validate());
  CHECK_THROWS(EnsembleParams{2, INFINITY, 0.0}.validate());
}

TEST_CASE("apply_oat identity and inverse") {
  const PureState css = build_state(StateKind::css, 4);
  const PureState same = apply_oat(css, 0.0, Axis::x);
  CHECK((same.amplitudes() - css.amplitudes()).cwiseAbs().maxCoeff() < 1e-15);
  const PureState back = apply_oat(apply_oat(css, 0.7, Axis::x), -0.7, Axis::x);
  CHECK((back.amplitudes() - css.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
  const PureState back_z = apply_oat(apply_oat(css, 1.3, Axis::z), -1.3, Axis::z);
  CHECK((back_z.amplitudes() - css.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS((void)apply_oat(css, 0.3, Axis::y), std::invalid_argument);
}

TEST_CASE("apply_oat matches a dense matrix exponential") {
  for (int n : {2, 3, 5}) {
    const Eigen::MatrixXcd sx = dense_collective(n, Axis::x);
    const Eigen::MatrixXcd sz = dense_collective(n, Axis::z);
    const double mu = 0.9;
    const PureState css = build_state(StateKind::css, n);
    const PureState ground = build_state(StateKind::ground, n);
    const Eigen::VectorXcd ref_x = unitary_from(0.5 * mu * sx * sx) * ground.amplitudes();
    const Eigen::VectorXcd ref_z = unitary_from(0.5 * mu * sz * sz) * css.amplitudes();
    CHECK((apply_oat(ground, mu, Axis::x).amplitudes() - ref_x).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((apply_oat(css, mu, Axis::z).amplitudes() - ref_z).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("twisting at mu = pi makes GHZ-class states") {
  // Ground state twisted about x is the readout image of |down down>.
  const PureState ground = build_state(StateKind::ground, 2);
  const PureState twisted = apply_oat(ground, std::numbers::pi, Axis::x);
  const Eigen::VectorXcd image = u_ghz(2).col(0);
  CHECK(fidelity(twisted, PureState(2, image)) == doctest::Approx(1.0).epsilon(1e-12));

  // CSS twisted about z is an equal-weight cat of the S_x extremes |++>, |-->.
  const PureState cat = apply_oat(build_state(StateKind::css, 2), std::numbers::pi, Axis::z);
  Eigen::VectorXcd plus = Eigen::VectorXcd::Constant(4, 0.5);
  Eigen::VectorXcd minus(4);
  minus << 0.5, -0.5, -0.5, 0.5;
  CHECK(std::norm(plus.dot(cat.amplitudes())) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::norm(minus.dot(cat.amplitudes())) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("apply_rotation examples") {
  const PureState up = apply_rotation(build_state(StateKind::ground, 1), std::numbers::pi, Axis::x);
  CHECK(std::abs(up[1]) == doctest::Approx(1.0).epsilon(1e-15));

  const double theta = 0.37;
  const PureState ghz = build_state(StateKind::ghz, 2);
  const PureState turned = apply_rotation(ghz, theta, Axis::z);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(turned[i]) == doctest::Approx(std::abs(ghz[i])));
    const double m = sz_eigenvalue(2, i);
    CHECK(std::abs(turned[i] - ghz[i] * std::exp(cplx{0.0, -theta * m})) < 1e-15);
  }

  const PureState css = build_state(StateKind::css, 3);
  const PureState back =
      apply_rotation(apply_rotation(css, std::numbers::pi / 2, Axis::x), -std::numbers::pi / 2, Axis::x);
  CHECK((back.amplitudes() - css.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rotations preserve the norm") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 6; ++n) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(basis_dimension(n)));
    for (auto& a : v) a = {g(rng), g(rng)};
    v.normalize();
    PureState s(n, v);
    for (Axis ax : {Axis::x, Axis::y, Axis::z}) s = apply_rotation(s, g(rng), ax);
    s = apply_oat(s, g(rng), Axis::x);
    s = apply_oat(s, g(rng), Axis::z);
    CHECK(std::abs(s.amplitudes().squaredNorm() - 1.0) < 1e-12);
  }
}

TEST_CASE("u_ghz on the ground state for N = 2") {
  const Eigen::MatrixXcd u = u_ghz(2);
  Eigen::VectorXcd expected = Eigen::VectorXcd::Zero(4);
  const cplx pref = std::exp(cplx{0.0, -std::numbers::pi / 4}) / std::numbers::sqrt2;
  expected[0] = pref;
  expected[3] = pref * cplx{0.0, -1.0};  // i^3
  CHECK(fidelity(PureState(2, u.col(0)), PureState(2, expected)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("u_ghz gate sequence equals the closed form for N <= 10") {
  for (int n = 1; n <= 10; ++n) {
    CAPTURE(n);
    const Eigen::MatrixXcd u = u_ghz(n);
    const Eigen::MatrixXcd closed = u_ghz_closed_form(n);
    const auto dim = u.rows();
    CHECK((u * u.adjoint() - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(max_diff_up_to_phase(closed, u) < 1e-12);
  }
  CHECK_THROWS_AS((void)u_ghz(0), std::invalid_argument);
}

TEST_CASE("u_ghz for N = 3 matches the closed form elementwise with one global phase") {
  const Eigen::MatrixXcd u = u_ghz(3);
  const Eigen::MatrixXcd closed = u_ghz_closed_form(3);
  const cplx phase = closed(0, 0) / u(0, 0);
  CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
  CHECK((closed - phase * u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sss_moments limits") {
  for (int n : {2, 5, 40}) {
    const SpinMoments m = sss_moments(n, 0.0);
    const SpinMoments c = css_moments(n);
    CHECK(m.mean_sx == doctest::Approx(c.mean_sx).epsilon(1e-15));
    CHECK(m.var_sy == doctest::Approx(c.var_sy).epsilon(1e-15));
    CHECK(m.mean_sx == 0.5 * n);
    CHECK(m.var_sy == 0.25 * n);
  }
  CHECK(std::abs(sss_moments(4, std::numbers::pi).mean_sx) < 1e-15);
  CHECK_THROWS_AS((void)sss_moments(1, 0.3), std::invalid_argument);
}

TEST_CASE("sss_moments match the brute-force squeezed state") {
  {
    const PureState s = build_sss_state(6, 0.4);
    CHECK(spin_second_moment(s, Axis::y, Axis::y) - std::pow(spin_mean(s, Axis::y), 2) ==
          doctest::Approx(sss_moments(6, 0.4).var_sy).epsilon(1e-10));
  }
  for (int n = 2; n <= 10; ++n) {
    for (int k = 1; k <= 20; ++k) {
      const double mu = std::numbers::pi * k / 20.0;
      CAPTURE(n);
      CAPTURE(mu);
      const PureState s = build_sss_state(n, mu);
      const SpinMoments m = sss_moments(n, mu);
      const double mean_y = spin_mean(s, Axis::y);
      CHECK(std::abs(spin_mean(s, Axis::x) - m.mean_sx) < 1e-10);
      CHECK(std::abs(mean_y) < 1e-10);
      CHECK(std::abs(spin_second_moment(s, Axis::y, Axis::y) - mean_y * mean_y - m.var_sy) < 1e-10);
    }
  }
}
