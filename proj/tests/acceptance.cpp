// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance                 run every criterion
//   acceptance --criterion K   run only criterion K (1..10)
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ghzclock/allan.hpp"
#include "ghzclock/clock.hpp"
#include "ghzclock/sensitivity.hpp"
#include "ghzclock/workers.hpp"

using namespace ghzclock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_error(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
  constexpr double kProbTol = 1e-10;
  constexpr double kQfiRelTol = 1e-8;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_prob = 0.0;
  double worst_state = 0.0;
  double worst_parity = 0.0;
  double worst_qfi = 0.0;
  for (int n = 1; n <= 6; ++n) {
    for (int d = 0; d < 50; ++d) {
      const EnsembleParams p{n, 2.0 * u(rng), u(rng)};
      const double t = u(rng);
      const double phi = 2.0 * std::numbers::pi * u(rng);
      const OutcomeDistribution closed = heralded_distribution(p, phi, t);
      const OutcomeDistribution brute = oracle::heralded_distribution(p, phi, t);
      for (std::size_t i = 0; i < closed.probs.size(); ++i) {
        worst_prob = std::max(worst_prob, std::abs(closed.probs[i] - brute.probs[i]));
      }
      const DensityState evolved =
          evolve_oracle(DensityState::from_pure(build_state(StateKind::ghz, n)), {p, t, phi});
      worst_state = std::max(worst_state, max_abs(evolved.matrix() - evolve_ghz_analytic({p, t, phi}).matrix()));
      worst_parity = std::max(worst_parity, std::abs(parity_signal(p, phi, t) - oracle::parity_signal(p, phi, t)));
      const double f_closed = qfi_ghz_closed(p, t);
      worst_qfi = std::max(worst_qfi, std::abs(qfi_numeric(evolved) - f_closed) / f_closed);
    }
  }
  const bool pass = worst_prob <= kProbTol && worst_state <= kProbTol && worst_parity <= kProbTol &&
                    worst_qfi <= kQfiRelTol;
  return {pass, fmt("max |dP| %.2e, max |d rho| %.2e, max |d parity| %.2e, max rel dF %.2e", worst_prob,
                    worst_state, worst_parity, worst_qfi)};
}

Outcome qcrb_saturation() {
  constexpr double kTol = 1e-10;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  bool unbiased = true;
  for (int d = 0; d < 100; ++d) {
    ProtocolSpec s;
    s.kind = ProtocolKind::heralded_ghz;
    s.params = {1 + d % 10, 2.0 * u(rng), u(rng)};
    const double t = 0.5 * u(rng);
    const MseResult r = phase_uncertainty_mse(s, default_estimator(s, t), t);
    const double bound = ghz_qcrb(s.params, t);
    worst = std::max(worst, std::abs(r.delta_phi_sq - bound) / std::max(1.0, bound));
    unbiased = unbiased && r.locally_unbiased;
  }
  return {worst <= kTol && unbiased,
          fmt("max |MSE - QCRB| / max(1, QCRB) = %.2e, all locally unbiased: %s", worst, unbiased ? "yes" : "no")};
}

Outcome parity_sql() {
  const EnsembleParams base{1, 0.7, 0.3};
  const std::array kinds{ProtocolKind::parity_ghz};
  const auto rows = sweep_vs_N(kinds, 2, 20, base.gamma_decay, base.gamma_dephase);
  double worst_ratio = 0.0;
  double worst_t = 0.0;
  for (const SweepEntry& e : rows) {
    worst_ratio = std::max(worst_ratio, std::abs(e.ratio - 1.0));
    const double expected = 1.0 / (e.n_atoms * base.total_rate());
    worst_t = std::max(worst_t, std::abs(e.t_min - expected) / expected);
  }
  return {worst_ratio <= 1e-6 && worst_t <= 1e-5,
          fmt("max |ratio - 1| = %.2e, max rel t_min error = %.2e over N = 2..20", worst_ratio, worst_t)};
}

Outcome heralded_plateau() {
  constexpr double kAsymptote = 0.8127421984;
  const std::array kinds{ProtocolKind::heralded_ghz};
  const auto slow = sweep_vs_N(kinds, 4, 40, 0.01);
  const auto mid = sweep_vs_N(kinds, 4, 40, 1.0);
  const auto fast = sweep_vs_N(kinds, 4, 40, 100.0);
  bool in_band = true;
  bool monotone = true;
  double spread = 0.0;
  for (std::size_t i = 0; i < mid.size(); ++i) {
    in_band = in_band && mid[i].ratio >= 0.80 && mid[i].ratio <= 0.84;
    if (i > 0) monotone = monotone && mid[i].ratio <= mid[i - 1].ratio * (1.0 + 1e-9);
    monotone = monotone && mid[i].ratio >= kAsymptote * (1.0 - 1e-9);
    spread = std::max({spread, std::abs(slow[i].ratio - mid[i].ratio) / mid[i].ratio,
                       std::abs(fast[i].ratio - mid[i].ratio) / mid[i].ratio});
  }
  const double last = mid.back().ratio;
  const bool converged = std::abs(last - kAsymptote) < 1e-4;
  return {in_band && monotone && converged && spread < 1e-6,
          fmt("ratio(N=4) = %.6f, ratio(N=40) = %.6f, band ok: %s, monotone: %s, Gamma spread %.1e", mid.front().ratio,
              last, in_band ? "yes" : "no", monotone ? "yes" : "no", spread)};
}

Outcome linear_ghz() {
  double worst_two = 0.0;
  bool exceeds = true;
  for (double gt : {0.01, 0.1, 0.5, 1.0, 3.0}) {
    for (double gp : {0.0, 0.4}) {
      ProtocolSpec s;
      s.kind = ProtocolKind::linear_ghz;
      s.params = {2, gt, gp};
      const double bound = ghz_qcrb(s.params, 1.0);
      worst_two = std::max(worst_two, std::abs(phase_uncertainty_closed(s, 1.0) - bound) / bound);
      for (int n = 3; n <= 20; ++n) {
        s.params.n_atoms = n;
        exceeds = exceeds && phase_uncertainty_closed(s, 1.0 / n) > ghz_qcrb(s.params, 1.0 / n);
      }
    }
  }
  const std::array kinds{ProtocolKind::linear_ghz};
  const auto rows = sweep_vs_N(kinds, 4, 60, 1.0);
  bool rising = true;
  for (std::size_t i = 1; i < rows.size(); ++i) rising = rising && rows[i].ratio >= rows[i - 1].ratio;
  const double at60 = rows.back().ratio;
  return {worst_two <= 1e-12 && exceeds && rising && at60 > 0.95,
          fmt("N=2 rel dev %.1e, exceeds QCRB for N=3..20: %s, ratio rising N=4..60: %s, ratio(60) = %.6f", worst_two,
              exceeds ? "yes" : "no", rising ? "yes" : "no", at60)};
}

Outcome sss_crossover() {
  const std::array kinds{ProtocolKind::heralded_ghz, ProtocolKind::sss};
  const auto rows = sweep_vs_N(kinds, 2, 60, 1.0);
  int first = -1;
  double her = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    if (rows[i + 1].ratio < rows[i].ratio) {
      first = rows[i].n_atoms;
      her = rows[i].ratio;
      sq = rows[i + 1].ratio;
      break;
    }
  }
  return {first >= 39 && first <= 45,
          fmt("first N with SSS below heralded GHZ: %d (sss %.6f vs heralded %.6f)", first, sq, her)};
}

Outcome asymptotic_approach() {
  const std::array kinds{ProtocolKind::sss};
  const int ns[] = {50, 100, 200, 500};
  std::vector<double> scaled;
  for (int n : ns) {
    const double ratio = sweep_vs_N(kinds, n, n, 1.0).front().ratio;
    // (Delta omega / Delta omega_SQL)^2 * e = Delta omega^2 N tau / (Gamma + gamma)
    scaled.push_back(ratio * ratio * std::numbers::e);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < scaled.size(); ++i) decreasing = decreasing && scaled[i] < scaled[i - 1];
  const bool above_one = std::all_of(scaled.begin(), scaled.end(), [](double v) { return v > 1.0; });
  return {decreasing && above_one && scaled.back() < 1.3,
          fmt("Delta omega^2 N tau / (Gamma+gamma) at N = 50, 100, 200, 500: %.4f %.4f %.4f %.4f (needs < 1.3 at 500)",
              scaled[0], scaled[1], scaled[2], scaled[3])};
}

struct ClockStats {
  std::vector<double> sigma_1s;
  std::vector<std::size_t> hops;
  std::vector<double> zero_fraction;
};

ClockStats run_clocks(const ProtocolSpec& spec, double T, std::size_t cycles, int runs, std::uint64_t seed0) {
  const ClockPreset preset = ca_plus_preset();
  ClockStats stats;
  stats.sigma_1s.resize(static_cast<std::size_t>(runs));
  stats.hops.resize(static_cast<std::size_t>(runs));
  stats.zero_fraction.resize(static_cast<std::size_t>(runs));
  const EstimatorSpec est = default_estimator(spec, T);
  parallel_for(static_cast<std::size_t>(runs), [&](std::size_t r) {
    const ClockTrace trace = run_clock(spec, est, preset.lo, ServoConfig{}, T, cycles, seed0 + r);
    const AllanEstimate a = allan_deviation(trace);
    stats.sigma_1s[r] = a.sigma_y_at_1s;
    stats.hops[r] = a.hop_count;
    stats.zero_fraction[r] = trace.zero_step_fraction();
  });
  return stats;
}

ProtocolSpec ca_spec(ProtocolKind kind, int n) {
  const ClockPreset preset = ca_plus_preset();
  ProtocolSpec s;
  s.kind = kind;
  s.params = {n, preset.gamma_decay, preset.gamma_dephase};
  return s;
}

Outcome clock_consistency() {
  const ClockPreset preset = ca_plus_preset();
  const double t_spont = 1.0 / preset.gamma_decay;
  const double T = 0.1 * t_spont;
  std::string detail;
  bool pass = true;
  for (ProtocolKind kind : {ProtocolKind::heralded_ghz, ProtocolKind::css}) {
    const ProtocolSpec spec = ca_spec(kind, 4);
    const ClockStats s = run_clocks(spec, T, 100'000, 10, 42);
    const double predicted = std::sqrt(phase_uncertainty_closed(spec, T)) / (preset.lo.carrier * std::sqrt(T));
    const double mean = mean_of(s.sigma_1s);
    const double se = std_error(s.sigma_1s);
    const double z = (mean - predicted) / se;
    pass = pass && std::abs(z) <= 3.0;
    detail += fmt("%s: sigma_y(1 s) = %.4e +- %.1e vs %.4e (%.2f SE)  ", std::string(to_string(kind)).c_str(), mean,
                  se, predicted, z);
  }
  return {pass, detail};
}

Outcome fringe_hops() {
  const ClockPreset preset = ca_plus_preset();
  const double T = 2.0 / preset.gamma_decay;
  const ProtocolSpec spec = ca_spec(ProtocolKind::heralded_ghz, 4);
  const ClockStats s = run_clocks(spec, T, 100'000, 10, 4242);
  const auto with_hops = std::count_if(s.hops.begin(), s.hops.end(), [](std::size_t h) { return h > 0; });
  const double predicted = std::sqrt(phase_uncertainty_closed(spec, T)) / (preset.lo.carrier * std::sqrt(T));
  const double mean = mean_of(s.sigma_1s);
  const double se = std_error(s.sigma_1s);
  const double z = (mean - predicted) / se;
  std::size_t total_hops = 0;
  for (std::size_t h : s.hops) total_hops += h;
  return {with_hops >= 8 && z > 3.0,
          fmt("seeds with hops: %d/10 (total %zu), sigma_y(1 s) = %.4e vs %.4e (%.1f SE above)",
              static_cast<int>(with_hops), total_hops, mean, predicted, z)};
}

Outcome discard_rate() {
  const ClockPreset preset = ca_plus_preset();
  bool pass = true;
  std::string detail;
  for (double T : {0.11, 0.5}) {
    const ProtocolSpec spec = ca_spec(ProtocolKind::heralded_ghz, 4);
    constexpr std::size_t kCycles = 100'000;
    const ClockTrace trace = run_clock(spec, default_estimator(spec, T), preset.lo, ServoConfig{}, T, kCycles, 99);
    const int n = spec.params.n_atoms;
    const double keep = std::exp(-preset.gamma_decay * T);
    const double expected = 1.0 - 0.5 * (1.0 + std::pow(1.0 - keep, n) + std::pow(keep, n));
    const double sigma = std::sqrt(expected * (1.0 - expected) / kCycles);
    const double observed = trace.zero_step_fraction();
    const double z = (observed - expected) / sigma;
    pass = pass && std::abs(z) <= 4.0;
    detail += fmt("T = %.2f s: %.5f vs %.5f (%.2f sigma)  ", T, observed, expected, z);
  }
  return {pass, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // wall-clock limit, 0 = none stated
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--criterion K]\n");
      return 1;
    }
  }
  const std::vector<Criterion> criteria = {
      {1, "oracle equivalence", 30.0, oracle_equivalence},
      {2, "QCRB saturation by the heralded estimator", 5.0, qcrb_saturation},
      {3, "parity GHZ reaches the SQL", 10.0, parity_sql},
      {4, "heralded GHZ gain plateau", 60.0, heralded_plateau},
      {5, "linear GHZ behaviour", 10.0, linear_ghz},
      {6, "SSS crossover", 120.0, sss_crossover},
      {7, "asymptotic bound approach", 30.0, asymptotic_approach},
      {8, "Monte-Carlo clock consistency", 0.0, clock_consistency},
      {9, "fringe hops at long T", 0.0, fringe_hops},
      {10, "heralded discard rate", 30.0, discard_rate},
  };
  bool all = true;
  bool ran = false;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s == 0.0 || elapsed < c.budget_s;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("criterion %2d %-4s %s | %s | %.1f s%s\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                elapsed, in_time ? "" : " (over budget)");
    std::fflush(stdout);
  }
  if (!ran) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 1;
  }
  return all ? 0 : 1;
}
