#include "ghzclock/lo_noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ghzclock {

std::string_view to_string(LoNoiseKind kind) {
  switch (kind) {
    case LoNoiseKind::flicker: return "flicker";
    case LoNoiseKind::white: return "white";
    case LoNoiseKind::none: return "none";
  }
  return "unknown";
}

LoNoiseKind parse_lo_noise_kind(std::string_view name) {
  if (name == "flicker") return LoNoiseKind::flicker;
  if (name == "white") return LoNoiseKind::white;
  if (name == "none") return LoNoiseKind::none;
  throw std::invalid_argument("unknown LO noise kind '" + std::string(name) +
                              "' (expected flicker, white, none)");
}

void LOModel::validate() const {
  if (!(carrier > 0.0) || !std::isfinite(carrier)) {
    throw std::invalid_argument("LO carrier must be finite and > 0");
  }
  if (noise_kind != LoNoiseKind::none && !(coherence_time > 0.0 && std::isfinite(coherence_time))) {
    throw std::invalid_argument("LO coherence_time must be finite and > 0");
  }
  if (!(flicker_floor >= 0.0) || !std::isfinite(flicker_floor)) {
    throw std::invalid_argument("flicker_floor must be finite and >= 0");
  }
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double ar1_window_variance(double rho, std::size_t m) {
  double v = static_cast<double>(m);
  double power = 1.0;
  for (std::size_t k = 1; k < m; ++k) {
    power *= rho;
    v += 2.0 * static_cast<double>(m - k) * power;
  }
  return v;
}

FlickerBank flicker_bank(const LOModel& model, std::size_t n_cycles, double T) {
  model.validate();
  if (!(T > 0.0)) throw std::invalid_argument("cycle period must be > 0");
  if (n_cycles < 8) {
    throw std::invalid_argument("flicker synthesis needs n_cycles >= 8 (at least 3 octaves between "
                                "1/(n T) and 1/T), got " + std::to_string(n_cycles));
  }
  FlickerBank bank;
  const auto octaves = static_cast<int>(std::floor(std::log2(static_cast<double>(n_cycles)))) + 1;
  for (int j = 0; j < octaves; ++j) {
    const double corner = std::ldexp(1.0, j) / (static_cast<double>(n_cycles) * T);
    bank.correlations.push_back(std::exp(-2.0 * std::numbers::pi * corner * T));
  }

  if (model.flicker_floor > 0.0) {
    bank.octave_std = model.flicker_floor * model.carrier / std::sqrt(2.0);
    return bank;
  }
  // Phase accumulated over Z is T times the sum of round(Z/T) samples.
  const auto window = static_cast<std::size_t>(std::max(1.0, std::round(model.coherence_time / T)));
  double total = 0.0;
  for (double rho : bank.correlations) total += ar1_window_variance(rho, window);
  bank.octave_std = 1.0 / (T * std::sqrt(total));
  return bank;
}

std::vector<double> gen_lo_noise(const LOModel& model, std::size_t n_cycles, double T,
                                 std::uint64_t seed) {
  if (n_cycles < 1) throw std::invalid_argument("n_cycles must be >= 1");
  model.validate();
  std::vector<double> out(n_cycles, 0.0);
  if (model.noise_kind == LoNoiseKind::none) return out;

  std::mt19937_64 rng = make_stream(seed, kLoStream);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (model.noise_kind == LoNoiseKind::white) {
    if (!(T > 0.0)) throw std::invalid_argument("cycle period must be > 0");
    const double s = 1.0 / std::sqrt(T * model.coherence_time);
    for (double& v : out) v = s * normal(rng);
    return out;
  }

  const FlickerBank bank = flicker_bank(model, n_cycles, T);
  const std::size_t octaves = bank.correlations.size();
  std::vector<double> state(octaves);
  std::vector<double> drive(octaves);
  for (std::size_t j = 0; j < octaves; ++j) {
    const double rho = bank.correlations[j];
    drive[j] = bank.octave_std * std::sqrt(1.0 - rho * rho);
    state[j] = bank.octave_std * normal(rng);
  }
  for (std::size_t k = 0; k < n_cycles; ++k) {
    double sum = 0.0;
    for (std::size_t j = 0; j < octaves; ++j) {
      if (k > 0) state[j] = bank.correlations[j] * state[j] + drive[j] * normal(rng);
      sum += state[j];
    }
    out[k] = sum;
  }
  return out;
}

}  // namespace ghzclock
