#include "ghzclock/protocols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ghzclock {
namespace {

constexpr double kLabelTol = 1e-9;

void require_duration(double T) {
  if (!std::isfinite(T) || T < 0.0) {
    throw std::invalid_argument("interrogation time must be finite and >= 0");
  }
}

// C(n, k) a^k b^(n-k) without overflow for large n.
double binomial_term(int n, int k, double a, double b) {
  if (a == 0.0) return k == 0 ? std::pow(b, n) : 0.0;
  if (b == 0.0) return k == n ? std::pow(a, n) : 0.0;
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_choose + k * std::log(a) + (n - k) * std::log(b));
}

std::vector<double> symmetric_labels(int n) {
  std::vector<double> labels(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) labels[static_cast<std::size_t>(k)] = k - 0.5 * n;
  return labels;
}

double ghz_contrast(const EnsembleParams& params, double T) {
  return std::exp(-0.5 * params.total_rate() * params.n_atoms * T);
}

double sign_power(int n) { return n % 2 == 0 ? 1.0 : -1.0; }

}  // namespace

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::css: return "css";
    case ProtocolKind::sss: return "sss";
    case ProtocolKind::parity_ghz: return "parity_ghz";
    case ProtocolKind::linear_ghz: return "linear_ghz";
    case ProtocolKind::heralded_ghz: return "heralded_ghz";
  }
  return "unknown";
}

ProtocolKind parse_protocol_kind(std::string_view name) {
  constexpr std::array kinds{ProtocolKind::css, ProtocolKind::sss, ProtocolKind::parity_ghz,
                             ProtocolKind::linear_ghz, ProtocolKind::heralded_ghz};
  for (ProtocolKind k : kinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown protocol '" + std::string(name) +
                              "' (expected css, sss, parity_ghz, linear_ghz, heralded_ghz)");
}

bool is_ghz_family(ProtocolKind kind) {
  return kind == ProtocolKind::parity_ghz || kind == ProtocolKind::linear_ghz ||
         kind == ProtocolKind::heralded_ghz;
}

void ProtocolSpec::validate() const {
  params.validate();
  if (kind == ProtocolKind::sss) {
    if (params.n_atoms < 2) throw std::invalid_argument("sss needs n_atoms >= 2");
    if (!(twist_mu > 0.0 && twist_mu <= std::numbers::pi)) {
      throw std::invalid_argument("sss twist_mu must lie in (0, pi]");
    }
  }
  if (working_point && !std::isfinite(*working_point)) {
    throw std::invalid_argument("working point must be finite");
  }
}

double ProtocolSpec::phi0() const {
  if (working_point) return *working_point;
  return is_ghz_family(kind) ? std::numbers::pi / (2.0 * params.n_atoms) : 0.0;
}

double ProtocolSpec::fringe_period() const {
  return is_ghz_family(kind) ? 2.0 * std::numbers::pi / params.n_atoms : 2.0 * std::numbers::pi;
}

double OutcomeDistribution::total() const {
  double s = 0.0;
  for (double p : probs) s += p;
  return s;
}

double OutcomeDistribution::prob_of(double outcome) const {
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (std::abs(outcomes[i] - outcome) < kLabelTol) return probs[i];
  }
  return 0.0;
}

double OutcomeDistribution::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) s += probs[i] * outcomes[i];
  return s;
}

double OutcomeDistribution::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) s += probs[i] * outcomes[i] * outcomes[i];
  return s;
}

OutcomeDistribution heralded_distribution(const EnsembleParams& params, double phi, double T) {
  params.validate();
  require_duration(T);
  const int n = params.n_atoms;
  const double keep = std::exp(-params.gamma_decay * T);
  const double decayed = -std::expm1(-params.gamma_decay * T);
  const double fringe = 2.0 * ghz_contrast(params, T) * std::cos(n * phi);
  const double incoherent = 1.0 + std::pow(decayed, n) + std::pow(keep, n);

  OutcomeDistribution d;
  d.outcomes = symmetric_labels(n);
  d.probs.assign(d.outcomes.size(), 0.0);
  d.probs.front() = std::max(0.0, 0.25 * (incoherent + fringe));
  d.probs.back() = std::max(0.0, 0.25 * (incoherent - fringe));
  // Interior labels: k atoms up, n - k down, symmetric in k <-> n - k.
  for (int k = 1; k < n; ++k) {
    d.probs[static_cast<std::size_t>(k)] =
        0.25 * (binomial_term(n, k, keep, decayed) + binomial_term(n, n - k, keep, decayed));
  }
  return d;
}

double parity_signal(const EnsembleParams& params, double phi, double T) {
  params.validate();
  require_duration(T);
  const int n = params.n_atoms;
  return sign_power(n) * ghz_contrast(params, T) * std::cos(n * phi);
}

OutcomeDistribution outcome_distribution(const ProtocolSpec& spec, double phi, double T) {
  spec.validate();
  require_duration(T);
  const int n = spec.params.n_atoms;
  switch (spec.kind) {
    case ProtocolKind::heralded_ghz:
    case ProtocolKind::linear_ghz:
      return heralded_distribution(spec.params, phi, T);
    case ProtocolKind::parity_ghz: {
      const double s = parity_signal(spec.params, phi, T);
      return {{-1.0, 1.0}, {0.5 * (1.0 - s), 0.5 * (1.0 + s)}};
    }
    case ProtocolKind::css: {
      const double c = std::exp(-0.5 * spec.params.total_rate() * T);
      const double up = 0.5 * (1.0 + c * std::sin(phi));
      OutcomeDistribution d;
      d.outcomes = symmetric_labels(n);
      d.probs.resize(d.outcomes.size());
      for (int k = 0; k <= n; ++k) {
        d.probs[static_cast<std::size_t>(k)] = binomial_term(n, k, up, 1.0 - up);
      }
      return d;
    }
    case ProtocolKind::sss:
      return oracle::sss_distribution(spec.params, spec.twist_mu, phi, T);
  }
  throw std::logic_error("unhandled protocol kind");
}

EstimatorSpec default_estimator(const ProtocolSpec& spec, double T) {
  spec.validate();
  require_duration(T);
  const int n = spec.params.n_atoms;
  const double decay = std::exp(-0.5 * spec.params.total_rate() * T);
  EstimatorSpec est;
  est.offset = spec.phi0();
  switch (spec.kind) {
    case ProtocolKind::heralded_ghz:
      est.kind = EstimatorKind::heralded;
      est.slope = 1.0;
      return est;
    case ProtocolKind::css:
      est.slope = decay * 0.5 * n;
      break;
    case ProtocolKind::sss:
      est.slope = decay * sss_moments(n, spec.twist_mu).mean_sx;
      break;
    case ProtocolKind::parity_ghz:
      est.slope = -sign_power(n) * n * ghz_contrast(spec.params, T);
      break;
    case ProtocolKind::linear_ghz:
      est.slope = 0.5 * n * n * ghz_contrast(spec.params, T);
      break;
  }
  if (!std::isfinite(est.slope) || est.slope == 0.0) {
    throw std::domain_error("signal slope vanishes at the working point (T = " +
                            std::to_string(T) + ")");
  }
  return est;
}

double estimate_phase(const EstimatorSpec& est, double outcome, const EnsembleParams& params,
                      double T) {
  if (!std::isfinite(outcome)) throw std::invalid_argument("outcome must be finite");
  if (est.kind == EstimatorKind::linear) return outcome / est.slope + est.offset;

  const int n = params.n_atoms;
  const double twice = 2.0 * outcome;
  const double rounded = std::round(twice);
  if (std::abs(twice - rounded) > kLabelTol || std::abs(rounded) > n ||
      (static_cast<long long>(rounded) + n) % 2 != 0) {
    throw std::invalid_argument("outcome " + std::to_string(outcome) +
                                " is not a valid S_z label for N = " + std::to_string(n));
  }
  const double deviation = 1.0 / (n * ghz_contrast(params, T));
  if (rounded == n) return est.offset + deviation;
  if (rounded == -n) return est.offset - deviation;
  return est.offset;
}

bool is_discarded(const EstimatorSpec& est, double outcome, int n_atoms) {
  return est.kind == EstimatorKind::heralded && std::abs(std::abs(2.0 * outcome) - n_atoms) > kLabelTol;
}

MseResult phase_uncertainty_mse(const ProtocolSpec& spec, const EstimatorSpec& est, double T) {
  const double phi0 = spec.phi0();
  // Deviations from the working point are summed directly so the finite
  // difference below does not cancel against phi0.
  const auto moments = [&](double phi) {
    const OutcomeDistribution d = outcome_distribution(spec, phi, T);
    double first = 0.0;
    double second = 0.0;
    for (std::size_t i = 0; i < d.outcomes.size(); ++i) {
      const double dev = estimate_phase(est, d.outcomes[i], spec.params, T) - phi0;
      first += d.probs[i] * dev;
      second += d.probs[i] * dev * dev;
    }
    return std::pair{first, second};
  };
  MseResult r;
  r.delta_phi_sq = moments(phi0).second;
  const double h = is_ghz_family(spec.kind) ? 1e-4 / spec.params.n_atoms : 1e-4;
  r.response_slope = (moments(phi0 + h).first - moments(phi0 - h).first) / (2.0 * h);
  r.locally_unbiased = std::abs(r.response_slope - 1.0) <= 1e-6;
  return r;
}

double ghz_qcrb(const EnsembleParams& params, double T) {
  params.validate();
  require_duration(T);
  const double n = params.n_atoms;
  const double decayed = -std::expm1(-params.gamma_decay * T);
  return std::exp(params.total_rate() * n * T) / (2.0 * n * n) *
         (1.0 + std::exp(-params.gamma_decay * n * T) + std::pow(decayed, n));
}

double linear_ghz_second_moment(const EnsembleParams& params, double T) {
  params.validate();
  require_duration(T);
  const double n = params.n_atoms;
  const double q = std::exp(-params.gamma_decay * T);
  return 0.25 * n * (1.0 + (n - 1.0) * (1.0 - 2.0 * q + 2.0 * q * q));
}

double phase_uncertainty_closed(const ProtocolSpec& spec, double T) {
  spec.validate();
  require_duration(T);
  const EnsembleParams& p = spec.params;
  const double n = p.n_atoms;
  switch (spec.kind) {
    case ProtocolKind::css:
      return std::exp(p.total_rate() * T) / n;
    case ProtocolKind::sss: {
      const SpinMoments m = evolve_moments(sss_moments(p.n_atoms, spec.twist_mu), {p, T, 0.0});
      return m.var_sy / (m.mean_sx * m.mean_sx);
    }
    case ProtocolKind::parity_ghz:
      return std::exp(p.total_rate() * n * T) / (n * n);
    case ProtocolKind::linear_ghz: {
      const double slope = 0.5 * n * n * ghz_contrast(p, T);
      return linear_ghz_second_moment(p, T) / (slope * slope);
    }
    case ProtocolKind::heralded_ghz:
      return ghz_qcrb(p, T);
  }
  throw std::logic_error("unhandled protocol kind");
}

namespace oracle {

OutcomeDistribution heralded_distribution(const EnsembleParams& params, double phi, double T) {
  params.validate();
  const int n = params.n_atoms;
  const Eigen::MatrixXcd u = u_ghz(n);
  Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(u.rows());
  ground[0] = 1.0;
  const PureState prepared(n, u * ground);
  const DensityState evolved = evolve_oracle(DensityState::from_pure(prepared), {params, T, phi});
  const DensityState readout = conjugate(evolved, u.adjoint());
  return {symmetric_labels(n), collective_distribution(readout, Axis::z)};
}

double parity_signal(const EnsembleParams& params, double phi, double T) {
  params.validate();
  const int n = params.n_atoms;
  const DensityState evolved =
      evolve_oracle(DensityState::from_pure(build_state(StateKind::ghz, n)), {params, T, phi});
  const Eigen::MatrixXcd& rho = evolved.matrix();
  const Eigen::Index all = rho.rows() - 1;
  double expectation = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) expectation += rho(i ^ all, i).real();
  return sign_power(n) * expectation;
}

OutcomeDistribution sss_distribution(const EnsembleParams& params, double mu, double phi,
                                     double T) {
  params.validate();
  const int n = params.n_atoms;
  const DensityState evolved =
      evolve_oracle(DensityState::from_pure(build_sss_state(n, mu)), {params, T, phi});
  return {symmetric_labels(n), collective_distribution(evolved, Axis::y)};
}

}  // namespace oracle
}  // namespace ghzclock
