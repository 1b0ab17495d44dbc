#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ghzclock/allan.hpp"
#include "ghzclock/clock.hpp"

using namespace ghzclock;

namespace {

ProtocolSpec heralded(int n, double gamma) {
  ProtocolSpec s;
  s.kind = ProtocolKind::heralded_ghz;
  s.params = {n, gamma, 0.0};
  return s;
}

LOModel quiet_lo() {
  LOModel lo;
  lo.noise_kind = LoNoiseKind::none;
  lo.carrier = kCaCarrier;
  return lo;
}

ClockTrace synthetic_trace(const std::vector<double>& tracking_error, double fringe_period) {
  ClockTrace t;
  t.period = 0.1;
  t.working_point = 0.25;
  t.fringe_period = fringe_period;
  for (double e : tracking_error) {
    CycleRecord r;
    r.true_phase = t.working_point + e;
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("servo config is validated") {
  CHECK_NOTHROW(ServoConfig{}.validate());
  CHECK_THROWS_AS((ServoConfig{0.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ServoConfig{2.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ServoConfig{0.5, -1e-3}.validate()), std::invalid_argument);
}

TEST_CASE("a discarded cycle leaves correction and integrator untouched") {
  Servo s(ServoConfig{0.5, 0.05});
  CHECK(s.update(0.1, 0.2, false) != 0.0);
  const double c = s.correction();
  const double i = s.integral();
  CHECK(s.update(0.3, 0.2, true) == 0.0);
  CHECK(s.correction() == c);
  CHECK(s.integral() == i);
}

TEST_CASE("servo locks a deterministic fringe for gains in [0.1, 1]") {
  const int n = 4;
  const double T = 0.1;
  for (double g : {0.1, 0.2, 0.3, 0.5, 0.75, 1.0}) {
    Servo servo(ServoConfig{g, ServoConfig{}.integral_gain});
    const double lo_offset = 0.2 / T;  // starts 0.2 rad off per cycle, inside the fringe
    double mean_error = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double delta = (lo_offset - servo.correction()) * T;
      if (k >= 900) mean_error += delta / 100.0;
      servo.update(std::sin(n * delta) / n, T, false);
    }
    INFO("gain " << g);
    CHECK(std::abs(mean_error) < 1e-3);
  }
}

TEST_CASE("clock runs are deterministic per seed") {
  const ClockPreset p = ca_plus_preset();
  const ProtocolSpec spec = heralded(4, p.gamma_decay);
  const double T = 0.11;
  const auto a = run_clock(spec, default_estimator(spec, T), p.lo, ServoConfig{}, T, 3000, 42);
  const auto b = run_clock(spec, default_estimator(spec, T), p.lo, ServoConfig{}, T, 3000, 42);
  const auto c = run_clock(spec, default_estimator(spec, T), p.lo, ServoConfig{}, T, 3000, 43);
  REQUIRE(a.n_cycles() == 3000);
  bool same = true;
  bool differs = false;
  for (std::size_t k = 0; k < a.n_cycles(); ++k) {
    const CycleRecord& x = a.records[k];
    const CycleRecord& y = b.records[k];
    same = same && x.true_phase == y.true_phase && x.outcome == y.outcome &&
           x.estimate == y.estimate && x.correction == y.correction && x.lo_offset == y.lo_offset;
    differs = differs || x.outcome != c.records[k].outcome;
  }
  CHECK(same);
  CHECK(differs);
  CHECK(allan_deviation(a).sigma_y == allan_deviation(b).sigma_y);
}

TEST_CASE("noise-free heralded N=2 keeps every outcome and centres on the working point") {
  const ProtocolSpec spec = heralded(2, 0.0);
  const double T = 0.1;
  const auto trace = run_clock(spec, default_estimator(spec, T), quiet_lo(), ServoConfig{}, T, 20'000, 5);
  CHECK(trace.working_point == doctest::Approx(std::numbers::pi / 4));
  CHECK(trace.zero_step_fraction() == 0.0);
  // Every estimate is phi0 +- 1/N; the servo keeps their mean on phi0.
  double mean = 0.0;
  for (const CycleRecord& r : trace.records) {
    CHECK(std::abs(std::abs(r.estimate - trace.working_point) - 0.5) < 1e-12);
    mean += (r.estimate - trace.working_point) / static_cast<double>(trace.n_cycles());
  }
  CHECK(std::abs(mean) < 5.0 * 0.5 / std::sqrt(static_cast<double>(trace.n_cycles())));
  CHECK(detect_fringe_hops(trace).hop_count == 0);
}

TEST_CASE("discarded cycles match the heralding probability") {
  const ClockPreset p = ca_plus_preset();
  const ProtocolSpec spec = heralded(4, p.gamma_decay);
  const double T = 0.3;
  constexpr std::size_t kCycles = 20'000;
  const auto trace = run_clock(spec, default_estimator(spec, T), quiet_lo(), ServoConfig{}, T, kCycles, 8);
  const double keep = std::exp(-p.gamma_decay * T);
  const double expected = 1.0 - 0.5 * (1.0 + std::pow(1.0 - keep, 4) + std::pow(keep, 4));
  const double sigma = std::sqrt(expected * (1.0 - expected) / kCycles);
  CHECK(std::abs(trace.zero_step_fraction() - expected) < 4.0 * sigma);
}

TEST_CASE("quiet LO at short T produces no hops") {
  const ClockPreset p = ca_plus_preset();
  const ProtocolSpec spec = heralded(4, p.gamma_decay);
  const double T = 0.11;
  const auto trace = run_clock(spec, default_estimator(spec, T), quiet_lo(), ServoConfig{}, T, 20'000, 3);
  CHECK(detect_fringe_hops(trace).hop_count == 0);
}

TEST_CASE("one injected fringe step is exactly one hop") {
  const int n = 4;
  const double s = 2.0 * std::numbers::pi / n;
  std::vector<double> e(3000, 0.0);
  for (std::size_t k = 1000; k < e.size(); ++k) e[k] = s;
  const HopReport r = detect_fringe_hops(synthetic_trace(e, s));
  CHECK(r.hop_count == 1);
  REQUIRE(r.hop_cycles.size() == 1);
  CHECK(r.hop_cycles[0] >= 1000);
  CHECK(r.hop_cycles[0] < 1100);
  CHECK(r.final_fringe == 1);
}

TEST_CASE("a brief excursion that returns is not a hop") {
  const double s = std::numbers::pi / 2;
  std::vector<double> e(3000, 0.0);
  for (std::size_t k = 1000; k < 1060; ++k) e[k] = s;
  CHECK(detect_fringe_hops(synthetic_trace(e, s)).hop_count == 0);
}

TEST_CASE("constant frequency offset has zero Allan deviation") {
  ClockTrace t = synthetic_trace(std::vector<double>(5000, 0.0), 1.0);
  t.carrier = kCaCarrier;
  for (CycleRecord& r : t.records) {
    r.lo_offset = 3.0;
    r.correction = 1.0;
  }
  const AllanEstimate a = allan_deviation(t);
  REQUIRE(!a.sigma_y.empty());
  // Zero up to rounding in the cumulative sums.
  const double y = 2.0 / kCaCarrier;
  for (double s : a.sigma_y) CHECK(s <= 1e-12 * y);
}

TEST_CASE("Allan taus are validated") {
  const ClockTrace t = synthetic_trace(std::vector<double>(5000, 0.0), 1.0);
  const std::array<double, 1> off_grid{0.15};
  const std::array<double, 2> decreasing{0.5, 0.2};
  const std::array<double, 1> too_long{10.0};
  CHECK_THROWS_AS((void)allan_deviation(t, off_grid), std::invalid_argument);
  CHECK_THROWS_AS((void)allan_deviation(t, decreasing), std::invalid_argument);
  CHECK_THROWS_AS((void)allan_deviation(t, too_long), std::invalid_argument);
  const std::array<double, 2> ok{0.1, 0.5};
  CHECK(allan_deviation(t, ok).taus.size() == 2);
}

TEST_CASE("default taus follow a 1-2-5 sequence within the sample budget") {
  const auto taus = default_taus(10'000, 0.1);
  const std::vector<double> expected{0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
  REQUIRE(taus.size() == expected.size());
  for (std::size_t i = 0; i < taus.size(); ++i) CHECK(taus[i] == doctest::Approx(expected[i]));
}

TEST_CASE("white-FM fit recovers the prefactor") {
  const std::vector<double> taus{1, 2, 5, 10, 20, 50, 100};
  std::vector<double> sigma;
  for (double t : taus) sigma.push_back(3e-15 / std::sqrt(t));
  CHECK(fit_white_fm(taus, sigma) == doctest::Approx(3e-15).epsilon(1e-12));
}

TEST_CASE("presets") {
  const ClockPreset ca = preset_by_name("ca+");
  CHECK(ca.gamma_decay == doctest::Approx(1.0 / 1.1));
  CHECK(ca.lo.carrier == doctest::Approx(2.0 * std::numbers::pi * 411.042e12));
  CHECK(ca.lo.coherence_time == doctest::Approx(7.5));
  CHECK(ca.lo.noise_kind == LoNoiseKind::flicker);
  CHECK(preset_by_name("generic").gamma_decay == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)preset_by_name("sr"), std::invalid_argument);
}
