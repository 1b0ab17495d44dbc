#include "ghzclock/clock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ghzclock {

void ServoConfig::validate() const {
  if (!(primary_gain > 0.0 && primary_gain < 2.0)) {
    throw std::invalid_argument("primary_gain must lie in (0, 2)");
  }
  if (!(integral_gain >= 0.0) || !std::isfinite(integral_gain)) {
    throw std::invalid_argument("integral_gain must be finite and >= 0");
  }
}

Servo::Servo(const ServoConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

double Servo::update(double deviation, double T, bool discard) {
  if (discard) return 0.0;
  const double rate = deviation / T;
  integral_ += cfg_.integral_gain * rate;
  const double step = cfg_.primary_gain * rate + integral_;
  correction_ += step;
  return step;
}

std::vector<double> ClockTrace::fractional_frequency() const {
  std::vector<double> y(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    y[k] = (records[k].lo_offset - records[k].correction) / carrier;
  }
  return y;
}

std::vector<double> ClockTrace::tracking_error() const {
  std::vector<double> e(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) e[k] = records[k].true_phase - working_point;
  return e;
}

double ClockTrace::zero_step_fraction() const {
  if (records.empty()) return 0.0;
  std::size_t zero = 0;
  for (const CycleRecord& r : records) zero += (r.correction_step == 0.0) ? 1 : 0;
  return static_cast<double>(zero) / static_cast<double>(records.size());
}

ClockPreset ca_plus_preset() {
  ClockPreset p;
  p.name = "ca+";
  p.gamma_decay = 1.0 / 1.1;
  p.gamma_dephase = 0.0;
  p.lo.noise_kind = LoNoiseKind::flicker;
  p.lo.coherence_time = 7.5;
  p.lo.carrier = kCaCarrier;
  return p;
}

ClockPreset generic_preset() {
  ClockPreset p;
  p.name = "generic";
  p.gamma_decay = 1.0;
  p.gamma_dephase = 0.0;
  p.lo.noise_kind = LoNoiseKind::none;
  p.lo.coherence_time = 10.0;
  p.lo.carrier = 2.0 * std::numbers::pi * 1e15;
  return p;
}

ClockPreset preset_by_name(std::string_view name) {
  if (name == "ca+") return ca_plus_preset();
  if (name == "generic") return generic_preset();
  throw std::invalid_argument("unknown preset '" + std::string(name) + "' (expected ca+, generic)");
}

ClockTrace run_clock(const ProtocolSpec& spec, const EstimatorSpec& est, const LOModel& lo,
                     const ServoConfig& servo_cfg, double T, std::size_t n_cycles,
                     std::uint64_t seed) {
  spec.validate();
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("cycle period T must be > 0");
  const std::vector<double> offsets = gen_lo_noise(lo, n_cycles, T, seed);
  const OutcomeSampler sampler(spec, T);
  std::mt19937_64 rng = make_stream(seed, kReadoutStream);
  Servo servo(servo_cfg);

  ClockTrace trace;
  trace.period = T;
  trace.working_point = spec.phi0();
  trace.carrier = lo.carrier;
  trace.fringe_period = spec.fringe_period();
  trace.kind = spec.kind;
  trace.n_atoms = spec.params.n_atoms;
  trace.records.reserve(n_cycles);

  const double phi0 = trace.working_point;
  for (std::size_t k = 0; k < n_cycles; ++k) {
    CycleRecord r;
    r.lo_offset = offsets[k];
    r.correction = servo.correction();
    r.true_phase = (r.lo_offset - r.correction) * T + phi0;
    r.outcome = sampler.sample(r.true_phase, rng);
    r.estimate = estimate_phase(est, r.outcome, spec.params, T);
    const bool discard = is_discarded(est, r.outcome, spec.params.n_atoms);
    r.correction_step = servo.update(r.estimate - phi0, T, discard);
    trace.records.push_back(r);
  }
  return trace;
}

}  // namespace ghzclock
