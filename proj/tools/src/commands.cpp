#include "ghzclock/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "ghzclock/allan.hpp"
#include "ghzclock/app/csv.hpp"
#include "ghzclock/sensitivity.hpp"
#include "ghzclock/workers.hpp"

namespace ghzclock::app {
namespace {

// Full-scale traces are ~0.5 GB each; cap how many are alive at once.
constexpr std::size_t kFullScaleWorkers = 2;

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

/// Writes a table either to `config.out` (plus a manifest next to it) or to
/// `out`, with the manifest on `log`.
template <class Emit>
void emit_table(const RunConfig& config, std::ostream& out, std::ostream& log, Emit emit) {
  if (config.out.empty()) {
    std::istringstream m(manifest(config));
    for (std::string line; std::getline(m, line);) log << "# " << line << '\n';
    emit(out);
    return;
  }
  std::ofstream f = open_output(config.out);
  emit(f);
  finish(f, config.out);
  std::filesystem::path mpath = config.out;
  mpath.replace_extension(".manifest.toml");
  std::ofstream m = open_output(mpath);
  m << manifest(config);
  finish(m, mpath);
  log << "wrote " << config.out.string() << " and " << mpath.string() << '\n';
}

ExitCode run_sweep(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto rows = sweep_vs_N(c.protocols, c.n_lo, c.n_hi, c.gamma_decay, c.gamma_dephase);
  emit_table(c, out, log, [&](std::ostream& os) {
    CsvWriter w(os, {"n_atoms", "protocol", "t_min_s", "delta_omega_ratio", "converged", "mu_opt"});
    for (const SweepEntry& e : rows) {
      w.field(e.n_atoms).field(to_string(e.kind)).field(e.t_min).field(e.ratio).field(e.converged).field(e.mu_opt);
      w.end_row();
    }
  });
  return kExitOk;
}

ExitCode run_bounds(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const EnsembleParams p = c.params(c.n_atoms);
  const BoundSet b = bounds(p, c.tau);
  emit_table(c, out, log, [&](std::ostream& os) {
    CsvWriter w(os, {"n_atoms", "gamma_decay", "gamma_dephase", "tau_s", "sql", "asymptotic", "ghz_qcrb_min",
                     "ghz_t_min_s"});
    w.field(p.n_atoms).field(p.gamma_decay).field(p.gamma_dephase).field(c.tau);
    w.field(b.sql).field(b.asymptotic).field(b.ghz_qcrb_min).field(b.ghz_t_min);
    w.end_row();
  });
  return kExitOk;
}

ExitCode run_verify(const RunConfig& c, std::ostream& out, std::ostream& log) {
  const auto checks =
      verify_identities(c.verify_n_max, c.verify_draws, c.seed.value_or(kDefaultVerifySeed));
  bool all = true;
  for (const IdentityCheck& k : checks) {
    all = all && k.pass;
    log << (k.pass ? "pass " : "FAIL ") << k.identity << ": max deviation " << format_double(k.max_deviation)
        << " (tolerance " << format_double(k.tolerance) << ")\n";
  }
  emit_table(c, out, log, [&](std::ostream& os) {
    CsvWriter w(os, {"identity", "max_deviation", "tolerance", "pass"});
    for (const IdentityCheck& k : checks) {
      w.field(k.identity).field(k.max_deviation).field(k.tolerance).field(k.pass);
      w.end_row();
    }
  });
  return all ? kExitOk : kExitVerifyFailed;
}

struct ClockRun {
  std::uint64_t seed = 0;
  AllanEstimate allan;
  HopReport hops;
  double zero_step_fraction = 0.0;
  double mean_tracking_error = 0.0;
};

ExitCode run_clock_command(const RunConfig& c, std::ostream& out, std::ostream& log) {
  ProtocolSpec spec;
  spec.kind = c.protocols.front();
  spec.params = c.params(c.n_atoms);
  if (spec.kind == ProtocolKind::sss) {
    spec.twist_mu = c.twist_mu ? *c.twist_mu : optimize_sss(spec.params, c.T).mu_opt;
  }
  spec.validate();
  const EstimatorSpec est = default_estimator(spec, c.T);
  const double predicted = std::sqrt(phase_uncertainty_closed(spec, c.T)) / (c.lo.carrier * std::sqrt(c.T));
  const std::size_t cycles = c.effective_cycles();

  std::vector<ClockRun> results(c.runs);
  std::mutex write_mutex;
  const std::size_t workers = c.full_scale ? std::min(kFullScaleWorkers, worker_count()) : 0;
  parallel_for(
      c.runs,
      [&](std::size_t r) {
        ClockRun& res = results[r];
        res.seed = *c.seed + r;
        const ClockTrace trace = run_clock(spec, est, c.lo, c.servo, c.T, cycles, res.seed);
        res.allan = allan_deviation(trace, c.taus);
        res.hops = detect_fringe_hops(trace);
        res.zero_step_fraction = trace.zero_step_fraction();
        long double sum = 0.0L;
        for (double e : trace.tracking_error()) sum += e;
        res.mean_tracking_error = static_cast<double>(sum / static_cast<long double>(trace.n_cycles()));
        if (c.write_trace && !c.out.empty()) {
          const std::lock_guard lock(write_mutex);
          const auto path = c.out / ("trace_" + std::to_string(r) + ".csv");
          std::ofstream f = open_output(path);
          CsvWriter w(f, {"cycle", "true_phase", "outcome", "estimate", "correction", "correction_step", "lo_offset"});
          for (std::size_t k = 0; k < trace.records.size(); ++k) {
            const CycleRecord& rec = trace.records[k];
            w.field(k).field(rec.true_phase).field(rec.outcome).field(rec.estimate).field(rec.correction);
            w.field(rec.correction_step).field(rec.lo_offset);
            w.end_row();
          }
          finish(f, path);
        }
      },
      workers);

  const auto write_allan = [&](std::ostream& os) {
    CsvWriter w(os, {"run", "seed", "tau_s", "sigma_y"});
    for (std::size_t r = 0; r < results.size(); ++r) {
      const AllanEstimate& a = results[r].allan;
      for (std::size_t i = 0; i < a.taus.size(); ++i) {
        w.field(r).field(std::size_t{results[r].seed}).field(a.taus[i]).field(a.sigma_y[i]);
        w.end_row();
      }
    }
  };
  const auto write_summary = [&](std::ostream& os) {
    CsvWriter w(os, {"run", "seed", "sigma_y_at_1s", "predicted_sigma_y_at_1s", "hop_count", "final_fringe",
                     "zero_step_fraction", "mean_tracking_error_rad"});
    for (std::size_t r = 0; r < results.size(); ++r) {
      const ClockRun& res = results[r];
      w.field(r).field(std::size_t{res.seed}).field(res.allan.sigma_y_at_1s).field(predicted);
      w.field(res.hops.hop_count).field(static_cast<long long>(res.hops.final_fringe));
      w.field(res.zero_step_fraction).field(res.mean_tracking_error);
      w.end_row();
    }
  };
  const auto write_hops = [&](std::ostream& os) {
    CsvWriter w(os, {"run", "seed", "cycle"});
    for (std::size_t r = 0; r < results.size(); ++r) {
      for (std::size_t cycle : results[r].hops.hop_cycles) {
        w.field(r).field(std::size_t{results[r].seed}).field(cycle);
        w.end_row();
      }
    }
  };

  double mean = 0.0;
  for (const ClockRun& res : results) mean += res.allan.sigma_y_at_1s / static_cast<double>(results.size());
  double var = 0.0;
  for (const ClockRun& res : results) var += (res.allan.sigma_y_at_1s - mean) * (res.allan.sigma_y_at_1s - mean);
  const double se = results.size() > 1
                        ? std::sqrt(var / static_cast<double>(results.size() - 1) / static_cast<double>(results.size()))
                        : 0.0;
  std::size_t hops = 0;
  std::size_t runs_with_hops = 0;
  for (const ClockRun& res : results) {
    hops += res.hops.hop_count;
    runs_with_hops += res.hops.hop_count > 0 ? 1 : 0;
  }

  if (c.out.empty()) {
    std::istringstream m(manifest(c));
    for (std::string line; std::getline(m, line);) log << "# " << line << '\n';
    write_allan(out);
  } else {
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + c.out.string() + ": " + ec.message());
    const std::pair<const char*, std::function<void(std::ostream&)>> files[] = {
        {"allan.csv", write_allan},
        {"summary.csv", write_summary},
        {"hops.csv", write_hops},
        {"manifest.toml", [&](std::ostream& os) { os << manifest(c); }},
    };
    for (const auto& [name, write] : files) {
      const auto path = c.out / name;
      std::ofstream f = open_output(path);
      write(f);
      finish(f, path);
    }
    log << "wrote " << c.out.string() << "/{allan,summary,hops}.csv and manifest.toml\n";
  }
  log << to_string(spec.kind) << " N=" << spec.params.n_atoms << " T=" << format_double(c.T) << " s, " << c.runs
      << " x " << cycles << " cycles: sigma_y(1 s) = " << format_double(mean) << " +- " << format_double(se)
      << " (predicted " << format_double(predicted) << "), hops " << hops << " in " << runs_with_hops << "/"
      << c.runs << " runs\n";
  return kExitOk;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<IdentityCheck> verify_identities(int n_max, int draws, std::uint64_t seed) {
  constexpr double kProbTol = 1e-10;
  constexpr double kQfiRelTol = 1e-8;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  IdentityCheck prob{"heralded distribution vs oracle", 0.0, kProbTol, false};
  IdentityCheck state{"evolved GHZ state vs Kraus oracle", 0.0, kProbTol, false};
  IdentityCheck parity{"parity signal vs oracle", 0.0, kProbTol, false};
  IdentityCheck qfi{"GHZ QFI closed form vs eigendecomposition (relative)", 0.0, kQfiRelTol, false};
  IdentityCheck mse{"heralded estimator MSE vs GHZ QCRB (relative to the larger of 1 and QCRB)", 0.0, kProbTol, false};
  for (int n = 1; n <= n_max; ++n) {
    for (int d = 0; d < draws; ++d) {
      const EnsembleParams p{n, 2.0 * u(rng), u(rng)};
      const double t = u(rng);
      const double phi = 2.0 * std::numbers::pi * u(rng);
      const OutcomeDistribution closed = heralded_distribution(p, phi, t);
      const OutcomeDistribution brute = oracle::heralded_distribution(p, phi, t);
      for (std::size_t i = 0; i < closed.probs.size(); ++i) {
        prob.max_deviation = std::max(prob.max_deviation, std::abs(closed.probs[i] - brute.probs[i]));
      }
      const DensityState evolved =
          evolve_oracle(DensityState::from_pure(build_state(StateKind::ghz, n)), {p, t, phi});
      state.max_deviation =
          std::max(state.max_deviation, max_abs(evolved.matrix() - evolve_ghz_analytic({p, t, phi}).matrix()));
      parity.max_deviation =
          std::max(parity.max_deviation, std::abs(parity_signal(p, phi, t) - oracle::parity_signal(p, phi, t)));
      const double f_closed = qfi_ghz_closed(p, t);
      qfi.max_deviation = std::max(qfi.max_deviation, std::abs(qfi_numeric(evolved) - f_closed) / f_closed);

      ProtocolSpec spec;
      spec.kind = ProtocolKind::heralded_ghz;
      spec.params = p;
      const double t_short = 0.5 * t;
      const MseResult r = phase_uncertainty_mse(spec, default_estimator(spec, t_short), t_short);
      const double bound = ghz_qcrb(p, t_short);
      const double dev = r.locally_unbiased ? std::abs(r.delta_phi_sq - bound) / std::max(1.0, bound)
                                            : std::numeric_limits<double>::infinity();
      mse.max_deviation = std::max(mse.max_deviation, dev);
    }
  }
  std::vector<IdentityCheck> out{prob, state, parity, qfi, mse};
  for (IdentityCheck& k : out) k.pass = k.max_deviation <= k.tolerance;
  return out;
}

ExitCode run_command(const RunConfig& config, std::ostream& out, std::ostream& log) {
  config.validate();
  switch (config.command) {
    case Command::sweep: return run_sweep(config, out, log);
    case Command::bounds: return run_bounds(config, out, log);
    case Command::verify: return run_verify(config, out, log);
    case Command::clock: return run_clock_command(config, out, log);
  }
  return kExitUsage;
}

}  // namespace ghzclock::app
