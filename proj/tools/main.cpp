// ghzclock: sensitivity sweeps, bounds, clock Monte-Carlo and oracle checks.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 verify failure,
// 3 runtime error (I/O, optimizer, ...).

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ghzclock/app/commands.hpp"
#include "ghzclock/app/config.hpp"

using namespace ghzclock::app;

namespace {

struct Sub {
  CLI::App* app;
  Command command;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-estimation sweeps and atomic-clock Monte-Carlo for GHZ, CSS and squeezed protocols"};
  app.require_subcommand(1);

  KeyValues overrides;
  std::string config_path;

  // Every flag writes its config key, so files and flags share one resolver.
  const auto key = [&](CLI::App* sub, const std::string& flag, const std::string& name, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&overrides, name](const std::string& v) { overrides[name] = v; },
                                          help);
  };
  const auto switch_key = [&](CLI::App* sub, const std::string& flag, const std::string& name,
                              const std::string& help) {
    sub->add_flag_function(flag, [&overrides, name](std::int64_t) { overrides[name] = "true"; }, help);
  };
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value file; flags override it");
    key(sub, "--preset", "preset", "named parameter set: ca+ or generic (default)");
    key(sub, "--gamma-decay", "gamma_decay", "spontaneous decay rate Gamma, 1/s");
    key(sub, "--gamma-dephase", "gamma_dephase", "dephasing rate gamma, 1/s");
    key(sub, "--seed", "seed", "64-bit seed");
    key(sub, "--out", "out", "output file (sweep, bounds, verify) or directory (clock); default stdout");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "optimal frequency uncertainty relative to the SQL versus N");
  common(sweep);
  key(sweep, "--protocols", "protocols", "comma list of css, sss, parity_ghz, linear_ghz, heralded_ghz");
  key(sweep, "--n-range", "n_range", "atom numbers lo:hi");

  CLI::App* clock = app.add_subcommand("clock", "closed-loop clock Monte-Carlo with Allan analysis");
  common(clock);
  key(clock, "--protocol", "protocol", "interrogation protocol");
  key(clock, "--n", "n", "number of atoms");
  key(clock, "--T", "T", "interrogation time per cycle, s");
  key(clock, "--cycles", "cycles", "cycles per run (default 100000)");
  key(clock, "--runs", "runs", "independent runs, seeds seed .. seed+runs-1 (default 10)");
  switch_key(clock, "--full-scale", "full_scale", "run 10^7 cycles per run");
  key(clock, "--taus", "taus", "comma list of averaging times in s (multiples of T)");
  key(clock, "--twist-mu", "twist_mu", "twisting strength for sss; optimized at T when omitted");
  key(clock, "--lo-noise", "lo_noise", "flicker, white or none");
  key(clock, "--flicker-floor", "flicker_floor", "fractional flicker floor; 0 calibrates to the coherence time");
  key(clock, "--coherence-time", "coherence_time", "LO coherence time Z, s");
  key(clock, "--carrier", "carrier", "transition angular frequency, rad/s");
  key(clock, "--primary-gain", "primary_gain", "servo gain on the phase estimate, (0, 2)");
  key(clock, "--integral-gain", "integral_gain", "servo integrator gain, >= 0");
  switch_key(clock, "--write-trace", "write_trace", "also write per-cycle traces (needs --out)");

  CLI::App* bounds = app.add_subcommand("bounds", "SQL, asymptotic bound and optimized GHZ QCRB");
  common(bounds);
  key(bounds, "--n", "n", "number of atoms");
  key(bounds, "--tau", "tau", "total averaging time, s");

  CLI::App* verify = app.add_subcommand("verify", "closed forms against the dense oracle");
  common(verify);
  key(verify, "--n-max", "n_max", "largest atom number (default 6)");
  key(verify, "--draws", "draws", "random parameter draws per N (default 50)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  const Sub subs[] = {{sweep, Command::sweep}, {clock, Command::clock}, {bounds, Command::bounds},
                      {verify, Command::verify}};
  Command command = Command::verify;
  for (const Sub& s : subs) {
    if (s.app->parsed()) command = s.command;
  }

  try {
    KeyValues values = config_path.empty() ? KeyValues{} : read_config_file(config_path);
    for (const auto& [k, v] : overrides) values[k] = v;
    const RunConfig config = resolve_config(command, values);
    return run_command(config, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
