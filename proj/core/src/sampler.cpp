#include <bit>
#include <cmath>
#include <stdexcept>

#include "ghzclock/protocols.hpp"

namespace ghzclock {

OutcomeSampler::OutcomeSampler(const ProtocolSpec& spec, double T) : spec_(spec), duration_(T) {
  spec_.validate();
  if (!std::isfinite(T) || T < 0.0) {
    throw std::invalid_argument("interrogation time must be finite and >= 0");
  }
  if (spec_.kind == ProtocolKind::sss) {
    if (spec_.params.n_atoms <= kMaxDenseAtoms) {
      squeezed_ = build_sss_state(spec_.params.n_atoms, spec_.twist_mu);
    } else {
      decayed_ = evolve_moments(sss_moments(spec_.params.n_atoms, spec_.twist_mu),
                                {spec_.params, T, 0.0});
    }
  }
}

double OutcomeSampler::sample(double phi, std::mt19937_64& rng) const {
  const int n = spec_.params.n_atoms;
  switch (spec_.kind) {
    case ProtocolKind::heralded_ghz:
    case ProtocolKind::linear_ghz:
      return sample_discrete(heralded_distribution(spec_.params, phi, duration_), rng);
    case ProtocolKind::parity_ghz: {
      const double s = parity_signal(spec_.params, phi, duration_);
      return uniform01(rng) < 0.5 * (1.0 + s) ? 1.0 : -1.0;
    }
    case ProtocolKind::css: {
      const double c = std::exp(-0.5 * spec_.params.total_rate() * duration_);
      std::binomial_distribution<int> ups(n, 0.5 * (1.0 + c * std::sin(phi)));
      return ups(rng) - 0.5 * n;
    }
    case ProtocolKind::sss:
      return squeezed_ ? sample_trajectory(phi, rng) : sample_gaussian(phi, rng);
  }
  throw std::logic_error("unhandled protocol kind");
}

double OutcomeSampler::sample_discrete(const OutcomeDistribution& dist,
                                       std::mt19937_64& rng) const {
  const double u = uniform01(rng) * dist.total();
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    if (u < acc) return dist.outcomes[i];
  }
  return dist.outcomes.back();
}

double OutcomeSampler::sample_trajectory(double phi, std::mt19937_64& rng) const {
  const int n = spec_.params.n_atoms;
  Eigen::VectorXcd psi = squeezed_->amplitudes();
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    psi[i] *= std::exp(cplx{0.0, -phi * sz_eigenvalue(n, static_cast<std::size_t>(i))});
  }

  const double p_decay = -std::expm1(-spec_.params.gamma_decay * duration_);
  const double q_flip = -0.5 * std::expm1(-0.5 * spec_.params.gamma_dephase * duration_);
  for (int k = 0; k < n; ++k) {
    const auto mask = Eigen::Index{1} << k;
    if (p_decay > 0.0) {
      double excited = 0.0;
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if ((i & mask) != 0) excited += std::norm(psi[i]);
      }
      if (uniform01(rng) < p_decay * excited) {
        // Jump: the atom emitted, |up> -> |down>. Every down component is
        // overwritten by its up partner, which is exactly sigma_minus.
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
          if ((i & mask) != 0) {
            psi[i & ~mask] = psi[i];
            psi[i] = 0.0;
          }
        }
      } else {
        const double damp = std::sqrt(1.0 - p_decay);
        for (Eigen::Index i = 0; i < psi.size(); ++i) {
          if ((i & mask) != 0) psi[i] *= damp;
        }
      }
      psi.normalize();
    }
    if (q_flip > 0.0 && uniform01(rng) < q_flip) {
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        if ((i & mask) != 0) psi[i] = -psi[i];
      }
    }
  }

  kernels::apply_all_atoms(psi, n, measurement_basis(Axis::y));
  const double u = uniform01(rng) * psi.squaredNorm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    acc += std::norm(psi[i]);
    if (u < acc) return sz_eigenvalue(n, static_cast<std::size_t>(i));
  }
  return 0.5 * n;
}

double OutcomeSampler::sample_gaussian(double phi, std::mt19937_64& rng) const {
  std::normal_distribution<double> noise(0.0, std::sqrt(std::max(decayed_.var_sy, 0.0)));
  return decayed_.mean_sx * std::sin(phi) + noise(rng);
}

double sample_outcome(const ProtocolSpec& spec, double phi, double T, std::mt19937_64& rng) {
  return OutcomeSampler(spec, T).sample(phi, rng);
}

}  // namespace ghzclock
