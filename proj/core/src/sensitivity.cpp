#include "ghzclock/sensitivity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ghzclock/workers.hpp"

namespace ghzclock {
namespace {

constexpr double kQfiCutoff = 1e-12;
constexpr double kMuFloor = 1e-6;
// mu = pi itself gives a 0/0 in the closed-form moments for even N.
constexpr double kMuCeil = std::numbers::pi * (1.0 - 1e-4);

void require_positive_rate(const EnsembleParams& params) {
  if (!(params.total_rate() > 0.0)) {
    throw OptimizationError(
        "Gamma + gamma = 0: the frequency uncertainty keeps falling with T, no finite optimum");
  }
}

}  // namespace

double qfi_numeric(const DensityState& state) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(state.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed in qfi_numeric");
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Eigen::MatrixXcd& v = solver.eigenvectors();
  const int n = state.n_atoms();
  Eigen::VectorXd sz(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) sz[i] = sz_eigenvalue(n, static_cast<std::size_t>(i));
  const Eigen::MatrixXcd gen = v.adjoint() * sz.asDiagonal() * v;

  double f = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    for (Eigen::Index l = 0; l < lambda.size(); ++l) {
      const double sum = lambda[k] + lambda[l];
      if (sum <= kQfiCutoff) continue;
      const double diff = lambda[k] - lambda[l];
      f += diff * diff / sum * std::norm(gen(k, l));
    }
  }
  return 2.0 * f;
}

double qfi_ghz_closed(const EnsembleParams& params, double T) {
  params.validate();
  if (!std::isfinite(T) || T < 0.0) throw std::invalid_argument("T must be finite and >= 0");
  const double n = params.n_atoms;
  const double decayed = -std::expm1(-params.gamma_decay * T);
  return 2.0 * n * n * std::exp(-params.total_rate() * n * T) /
         (1.0 + std::pow(decayed, n) + std::exp(-params.gamma_decay * n * T));
}

double freq_variance(double delta_phi_sq, double T, double tau) {
  if (!(T > 0.0) || !(tau > 0.0)) {
    throw std::domain_error("freq_variance needs T > 0 and tau > 0");
  }
  return delta_phi_sq / (T * tau);
}

double sql_freq_variance(const EnsembleParams& params, double tau) {
  params.validate();
  if (!(tau > 0.0)) throw std::domain_error("tau must be > 0");
  return std::numbers::e * params.total_rate() / (params.n_atoms * tau);
}

SssOptimum optimize_sss(const EnsembleParams& params, double T) {
  if (params.n_atoms < 2) throw std::invalid_argument("optimize_sss needs n_atoms >= 2");
  ProtocolSpec spec{ProtocolKind::sss, params, kMuCeil, std::nullopt};
  const auto objective = [&](double mu) {
    spec.twist_mu = mu;
    return phase_uncertainty_closed(spec, T);
  };
  MinimizeOptions opts;
  opts.require_unimodal = false;
  opts.allow_edge = true;
  opts.rel_tol = 1e-8;
  const MinimizeResult r = minimize_scalar(objective, kMuFloor, kMuCeil, opts);
  return {r.x_min, r.min_value};
}

double freq_cost(const ProtocolSpec& spec, double T, bool optimize_twist) {
  if (spec.kind == ProtocolKind::sss && optimize_twist) {
    return optimize_sss(spec.params, T).delta_phi_sq / T;
  }
  return phase_uncertainty_closed(spec, T) / T;
}

std::pair<double, double> default_T_bracket(const EnsembleParams& params) {
  params.validate();
  require_positive_rate(params);
  const double rate = params.total_rate();
  return {1e-3 / (params.n_atoms * rate), 10.0 / rate};
}

SensitivityCurve sensitivity_curve(const ProtocolSpec& protocol, std::size_t n_samples) {
  protocol.validate();
  if (n_samples < 2) throw std::invalid_argument("n_samples must be >= 2");
  const auto [lo, hi] = default_T_bracket(protocol.params);
  SensitivityCurve curve;
  curve.protocol = protocol;
  curve.samples.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (n_samples - 1));
    const double cost = freq_cost(protocol, t);
    curve.samples.push_back({t, cost * t, cost});
  }
  const MinimizeResult r = minimize_over_T([&](double t) { return freq_cost(protocol, t); }, lo, hi);
  curve.t_min = r.x_min;
  curve.min_freq_var = r.min_value;
  curve.converged = r.converged;
  if (protocol.kind == ProtocolKind::sss) curve.mu_opt = optimize_sss(protocol.params, r.x_min).mu_opt;
  return curve;
}

std::vector<SweepEntry> sweep_vs_N(std::span<const ProtocolKind> kinds, int n_lo, int n_hi,
                                   double gamma_decay, double gamma_dephase,
                                   std::size_t workers) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("sweep needs 1 <= n_lo <= n_hi");
  std::vector<SweepEntry> tasks;
  for (int n = n_lo; n <= n_hi; ++n) {
    for (ProtocolKind k : kinds) {
      if (k == ProtocolKind::sss && n < 2) continue;
      SweepEntry e;
      e.n_atoms = n;
      e.kind = k;
      tasks.push_back(e);
    }
  }
  parallel_for(tasks.size(), [&](std::size_t i) {
    SweepEntry& e = tasks[i];
    ProtocolSpec spec;
    spec.kind = e.kind;
    spec.params = {e.n_atoms, gamma_decay, gamma_dephase};
    spec.twist_mu = kMuCeil;
    const auto [lo, hi] = default_T_bracket(spec.params);
    const MinimizeResult r = minimize_over_T([&](double t) { return freq_cost(spec, t); }, lo, hi);
    e.t_min = r.x_min;
    e.converged = r.converged;
    e.ratio = std::sqrt(r.min_value / sql_freq_variance(spec.params, 1.0));
    if (e.kind == ProtocolKind::sss) e.mu_opt = optimize_sss(spec.params, r.x_min).mu_opt;
  }, workers);
  return tasks;
}

BoundSet bounds(const EnsembleParams& params, double tau) {
  params.validate();
  require_positive_rate(params);
  if (!(tau > 0.0)) throw std::domain_error("tau must be > 0");
  BoundSet b;
  b.sql = sql_freq_variance(params, tau);
  b.asymptotic = params.total_rate() / (params.n_atoms * tau);
  const auto [lo, hi] = default_T_bracket(params);
  const MinimizeResult r =
      minimize_over_T([&](double t) { return ghz_qcrb(params, t) / t; }, lo, hi);
  b.ghz_qcrb_min = r.min_value / tau;
  b.ghz_t_min = r.x_min;
  return b;
}

}  // namespace ghzclock
