#include "ghzclock/app/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <system_error>

#include "ghzclock/app/csv.hpp"

namespace ghzclock::app {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) + "' (" +
                    std::string(why) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    bad_value(key, v, "expected a number");
  }
}

template <class Int>
Int to_integer(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "expected an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "expected true or false");
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> items;
  while (true) {
    const auto comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (!item.empty()) items.push_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return items;
}

template <class Parse>
auto wrap(std::string_view key, std::string_view v, Parse parse) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    bad_value(key, v, e.what());
  }
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"protocols",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.protocols.clear();
         for (std::string_view item : split_list(v)) {
           c.protocols.push_back(wrap(k, v, [&] { return parse_protocol_kind(item); }));
         }
       }},
      {"protocol",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.protocols = {wrap(k, v, [&] { return parse_protocol_kind(v); })};
       }},
      {"n", [](RunConfig& c, std::string_view k, std::string_view v) { c.n_atoms = to_integer<int>(k, v); }},
      {"n_range",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         const auto colon = v.find(':');
         if (colon == std::string_view::npos) bad_value(k, v, "expected lo:hi");
         c.n_lo = to_integer<int>(k, trim(v.substr(0, colon)));
         c.n_hi = to_integer<int>(k, trim(v.substr(colon + 1)));
       }},
      {"gamma_decay", [](RunConfig& c, std::string_view k, std::string_view v) { c.gamma_decay = to_double(k, v); }},
      {"gamma_dephase",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.gamma_dephase = to_double(k, v); }},
      {"twist_mu", [](RunConfig& c, std::string_view k, std::string_view v) { c.twist_mu = to_double(k, v); }},
      {"T", [](RunConfig& c, std::string_view k, std::string_view v) { c.T = to_double(k, v); }},
      {"cycles",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.cycles = to_integer<std::size_t>(k, v); }},
      {"runs", [](RunConfig& c, std::string_view k, std::string_view v) { c.runs = to_integer<std::size_t>(k, v); }},
      {"full_scale", [](RunConfig& c, std::string_view k, std::string_view v) { c.full_scale = to_bool(k, v); }},
      {"write_trace", [](RunConfig& c, std::string_view k, std::string_view v) { c.write_trace = to_bool(k, v); }},
      {"taus",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.taus.clear();
         for (std::string_view item : split_list(v)) c.taus.push_back(to_double(k, item));
       }},
      {"lo_noise",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.lo.noise_kind = wrap(k, v, [&] { return parse_lo_noise_kind(v); });
       }},
      {"flicker_floor",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.lo.flicker_floor = to_double(k, v); }},
      {"coherence_time",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.lo.coherence_time = to_double(k, v); }},
      {"carrier", [](RunConfig& c, std::string_view k, std::string_view v) { c.lo.carrier = to_double(k, v); }},
      {"primary_gain",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.servo.primary_gain = to_double(k, v); }},
      {"integral_gain",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.servo.integral_gain = to_double(k, v); }},
      {"tau", [](RunConfig& c, std::string_view k, std::string_view v) { c.tau = to_double(k, v); }},
      {"n_max", [](RunConfig& c, std::string_view k, std::string_view v) { c.verify_n_max = to_integer<int>(k, v); }},
      {"draws", [](RunConfig& c, std::string_view k, std::string_view v) { c.verify_draws = to_integer<int>(k, v); }},
      {"seed",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.seed = to_integer<std::uint64_t>(k, v); }},
      {"out", [](RunConfig& c, std::string_view, std::string_view v) { c.out = std::filesystem::path(v); }},
  };
  return table;
}

void apply_preset(RunConfig& c, std::string_view name) {
  ClockPreset p;
  try {
    p = preset_by_name(name);
  } catch (const std::invalid_argument& e) {
    bad_value("preset", name, e.what());
  }
  c.preset = p.name;
  c.gamma_decay = p.gamma_decay;
  c.gamma_dephase = p.gamma_dephase;
  c.lo = p.lo;
}

std::string join_protocols(const std::vector<ProtocolKind>& kinds) {
  std::string s;
  for (ProtocolKind k : kinds) {
    if (!s.empty()) s += ',';
    s += to_string(k);
  }
  return s;
}

void check(bool ok, std::string_view key, const std::string& why) {
  if (!ok) throw ConfigError("invalid value for '" + std::string(key) + "': " + why);
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::sweep: return "sweep";
    case Command::clock: return "clock";
    case Command::bounds: return "bounds";
    case Command::verify: return "verify";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  if (name == "sweep") return Command::sweep;
  if (name == "clock") return Command::clock;
  if (name == "bounds") return Command::bounds;
  if (name == "verify") return Command::verify;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

KeyValues parse_key_values(std::string_view text, std::string_view origin) {
  KeyValues out;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };

    // Strip a trailing comment that is not inside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where() + "empty key");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (!out.emplace(std::string(key), std::string(value)).second) {
      throw ConfigError(where() + "duplicate key '" + std::string(key) + "'");
    }
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str(), path.string());
}

std::size_t RunConfig::effective_cycles() const { return full_scale ? kFullScaleCycles : cycles; }

void RunConfig::validate() const {
  check(!protocols.empty(), "protocols", "at least one protocol is required");
  check(std::isfinite(gamma_decay) && gamma_decay >= 0.0, "gamma_decay", "must be finite and >= 0");
  check(std::isfinite(gamma_dephase) && gamma_dephase >= 0.0, "gamma_dephase", "must be finite and >= 0");
  switch (command) {
    case Command::sweep:
      check(n_lo >= 1 && n_hi >= n_lo, "n_range", "need 1 <= lo <= hi");
      break;
    case Command::bounds:
      check(n_atoms >= 1, "n", "must be >= 1");
      check(std::isfinite(tau) && tau > 0.0, "tau", "must be > 0");
      break;
    case Command::clock: {
      check(protocols.size() == 1, "protocol", "clock runs take exactly one protocol");
      check(n_atoms >= 1, "n", "must be >= 1");
      check(protocols.front() != ProtocolKind::sss || n_atoms >= 2, "n", "sss needs n >= 2");
      check(std::isfinite(T) && T > 0.0, "T", "must be > 0");
      check(effective_cycles() >= 1, "cycles", "must be >= 1");
      check(runs >= 1, "runs", "must be >= 1");
      check(seed.has_value(), "seed", "clock runs are stochastic and need an explicit seed");
      if (twist_mu) {
        check(*twist_mu > 0.0 && *twist_mu <= 3.141592653589793, "twist_mu", "must lie in (0, pi]");
      }
      try {
        lo.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid LO settings: ") + e.what());
      }
      try {
        servo.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid servo settings: ") + e.what());
      }
      for (double t : taus) check(std::isfinite(t) && t > 0.0, "taus", "every tau must be > 0");
      break;
    }
    case Command::verify:
      check(verify_n_max >= 1 && verify_n_max <= 8, "n_max", "must lie in [1, 8]");
      check(verify_draws >= 1, "draws", "must be >= 1");
      break;
  }
}

RunConfig resolve_config(Command command, const KeyValues& values) {
  RunConfig c;
  c.command = command;
  const auto preset = values.find("preset");
  apply_preset(c, preset == values.end() ? std::string_view("generic") : std::string_view(preset->second));

  for (const auto& [key, value] : values) {
    if (key == "preset") continue;
    if (key == "command") {
      if (parse_command(value) != command) {
        throw ConfigError("config was written for '" + value + "' but the command is '" +
                          std::string(to_string(command)) + "'");
      }
      continue;
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(c, key, value);
  }
  c.validate();
  return c;
}

std::string manifest(const RunConfig& c) {
  std::ostringstream m;
  const auto kv = [&](std::string_view key, const std::string& value) { m << key << " = " << value << '\n'; };
  kv("command", std::string(to_string(c.command)));
  kv("preset", c.preset);
  kv("gamma_decay", format_double(c.gamma_decay));
  kv("gamma_dephase", format_double(c.gamma_dephase));
  switch (c.command) {
    case Command::sweep:
      kv("protocols", join_protocols(c.protocols));
      kv("n_range", std::to_string(c.n_lo) + ":" + std::to_string(c.n_hi));
      break;
    case Command::bounds:
      kv("n", std::to_string(c.n_atoms));
      kv("tau", format_double(c.tau));
      break;
    case Command::clock: {
      kv("protocol", join_protocols(c.protocols));
      kv("n", std::to_string(c.n_atoms));
      if (c.twist_mu) kv("twist_mu", format_double(*c.twist_mu));
      kv("T", format_double(c.T));
      kv("cycles", std::to_string(c.cycles));
      kv("full_scale", c.full_scale ? "true" : "false");
      kv("runs", std::to_string(c.runs));
      if (!c.taus.empty()) {
        std::string t;
        for (double x : c.taus) t += (t.empty() ? "" : ",") + format_double(x);
        kv("taus", t);
      }
      kv("write_trace", c.write_trace ? "true" : "false");
      kv("lo_noise", std::string(to_string(c.lo.noise_kind)));
      kv("flicker_floor", format_double(c.lo.flicker_floor));
      kv("coherence_time", format_double(c.lo.coherence_time));
      kv("carrier", format_double(c.lo.carrier));
      kv("primary_gain", format_double(c.servo.primary_gain));
      kv("integral_gain", format_double(c.servo.integral_gain));
      break;
    }
    case Command::verify:
      kv("n_max", std::to_string(c.verify_n_max));
      kv("draws", std::to_string(c.verify_draws));
      break;
  }
  if (c.seed) kv("seed", std::to_string(*c.seed));
  if (!c.out.empty()) kv("out", "\"" + c.out.string() + "\"");
  return m.str();
}

}  // namespace ghzclock::app
