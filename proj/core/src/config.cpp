#include "rfcmpc/config.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/numfmt.hpp"

namespace rfcmpc {

namespace fs = std::filesystem;

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"history_csv", "", "path", "training history, timestamp,load_kw,pv_kw"},
      {"actuals_csv", "", "path", "realized series replayed by the simulation (same schema)"},
      {"prices_csv", "", "path", "export prices, timestamp,c_e_eur_per_kwh"},
      {"graph_file", "", "path", "pre-trained chain; when set, history_csv is not used for training"},
      {"out_dir", "out", "path", "directory for traces, KPIs and plans"},
      {"start", "", "ISO-8601 UTC", "first simulated quarter-hour (default: first actuals row)"},
      {"end", "", "ISO-8601 UTC", "exclusive end (default: last step with a full horizon of data)"},
      {"horizon", "96", "steps", "prediction horizon T"},
      {"scenarios", "10", "count", "reduced scenario count S"},
      {"samples", "300", "count", "sampled paths N before reduction"},
      {"seed", "1", "-", "base seed; step i samples with seed + i"},
      {"tau", "0.1", "normalized", "state spawn threshold of the Markov chain"},
      {"forecast", "markov", "markov|perfect", "scenario source"},
      {"rfc_enabled", "true", "bool", "false runs the no-RFC baseline"},
      {"online_learning", "true", "bool", "ingest each realized observation into the chain"},
      {"initial_soh", "0.5", "-", "tank state of hydrogen at start"},
      {"initial_mode", "SOEC", "mode", "mode applied in the step before start"},
      {"record_timing", "false", "bool", "write solver wall time to solve_ms"},
      {"breakpoints", "8", "count", "breakpoints L per conversion curve"},
      {"omega_plus", "1", "EUR/kW", "penalty on positive recourse"},
      {"omega_minus", "1", "EUR/kW", "penalty on negative recourse"},
      {"node_limit", "1000000", "nodes", "branch-and-bound node limit per solve"},
      {"time_limit_s", "inf", "s", "branch-and-bound time limit per solve"},
      {"sos2_branching", "false", "bool", "branch on SOS2 groups before binaries"},
      {"external_solver", "", "command", "shell template with {mps} and {sol}; replaces the built-in solver"},
      {"p_e_max", "340", "kW", "export limit"},
      {"p_el_min", "7.2", "kW", "minimum SOEC power"},
      {"p_el_max", "160", "kW", "maximum SOEC power"},
      {"p_f_min", "3.5", "kW", "minimum SOFC power"},
      {"p_f_max", "40", "kW", "maximum SOFC power"},
      {"p_tilde_el", "2.6", "kW", "demand while in T_SOEC"},
      {"p_tilde_f", "1.3", "kW", "demand while in T_SOFC"},
      {"e_h", "400", "kWh", "tank capacity"},
      {"h_min", "0", "-", "lower tank bound"},
      {"h_max", "1", "-", "upper tank bound"},
      {"n_cells", "100", "count", "stack cells"},
      {"theta", "1123", "K", "stack temperature"},
      {"delta_t", "0.25", "h", "step length (the data grid is fixed at 15 minutes)"},
      {"max_switches", "3", "count", "transition activations of each kind per window"},
      {"switch_window", "16", "steps", "rolling window of the switch limit"},
      {"c_m", "0.11", "EUR/kWh", "self-consumption incentive"},
      {"c_r", "0.009", "EUR/kWh", "restitution of grid charges"},
      {"alpha1", "4.87e-4", "W/K^2", "SOEC threshold coefficient"},
      {"alpha2", "9.46e-2", "W/K", "SOEC threshold coefficient"},
      {"alpha3", "46.34", "W", "SOEC threshold coefficient"},
      {"beta1", "2.32e-4", "1/(K kW)", "SOEC efficiency coefficient"},
      {"beta2", "0.33", "1/kW", "SOEC efficiency coefficient"},
      {"beta3", "7.7e-4", "1/K", "SOEC efficiency coefficient"},
  };
  return keys;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::string& raw(const std::string& key) const { return values_.at(key); }

  template <class F>
  void with(const std::string& key, F&& apply) const {
    if (!has(key)) return;
    try {
      apply(raw(key));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("config key '{}': {}", key, e.what()));
    }
  }
  void number(const std::string& key, double& out) const {
    with(key, [&](const std::string& v) { out = parse_double(v, key); });
  }
  void count(const std::string& key, std::size_t& out) const {
    with(key, [&](const std::string& v) {
      const long long n = parse_int(v, key);
      if (n < 0) throw ConfigError(fmt::format("config key '{}': must be >= 0", key));
      out = static_cast<std::size_t>(n);
    });
  }
  void integer(const std::string& key, int& out) const {
    with(key, [&](const std::string& v) { out = static_cast<int>(parse_int(v, key)); });
  }
  void flag(const std::string& key, bool& out) const {
    with(key, [&](const std::string& v) {
      if (v == "true") out = true;
      else if (v == "false") out = false;
      else throw ConfigError(fmt::format("config key '{}': expected true or false, got '{}'", key, v));
    });
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

AppConfig parse_config(std::istream& in, const fs::path& base_dir, bool check_files) {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> known;
  for (const auto& k : config_keys()) known[k.name] = true;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("config line {}: expected key = value", line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known.count(key)) throw ConfigError(fmt::format("config line {}: unknown key '{}'", line_no, key));
    if (values.count(key)) throw ConfigError(fmt::format("config line {}: duplicate key '{}'", line_no, key));
    if (value.empty()) throw ConfigError(fmt::format("config key '{}': empty value", key));
    values[key] = value;
  }
  const Reader r(std::move(values));

  AppConfig cfg;
  RunConfig& run = cfg.run;
  PlantParams& pp = run.params;
  auto path = [&](const std::string& key, fs::path& out) {
    r.with(key, [&](const std::string& v) {
      const fs::path p(v);
      out = p.is_absolute() ? p : base_dir / p;
    });
  };
  path("history_csv", cfg.history_csv);
  path("actuals_csv", cfg.actuals_csv);
  path("prices_csv", cfg.prices_csv);
  path("graph_file", cfg.graph_file);
  path("out_dir", cfg.out_dir);
  if (!r.has("out_dir")) cfg.out_dir = base_dir / "out";

  r.with("start", [&](const std::string& v) { run.start = parse_timestamp(v); });
  r.with("end", [&](const std::string& v) { run.end = parse_timestamp(v); });
  r.count("horizon", run.horizon);
  r.count("scenarios", run.scenarios);
  r.count("samples", run.samples);
  r.with("seed", [&](const std::string& v) {
    const long long s = parse_int(v, "seed");
    if (s < 0) throw ConfigError("config key 'seed': must be >= 0");
    run.seed = static_cast<std::uint64_t>(s);
  });
  r.number("tau", run.tau);
  r.with("forecast", [&](const std::string& v) {
    if (v == "markov") run.forecast = ForecastMode::Markov;
    else if (v == "perfect") run.forecast = ForecastMode::Perfect;
    else throw ConfigError(fmt::format("config key 'forecast': expected markov or perfect, got '{}'", v));
  });
  r.flag("rfc_enabled", run.rfc_enabled);
  r.flag("online_learning", run.online_learning);
  r.number("initial_soh", run.initial_soh);
  r.with("initial_mode", [&](const std::string& v) {
    const auto m = parse_mode(v);
    if (!m) throw ConfigError(fmt::format("config key 'initial_mode': unknown mode '{}'", v));
    run.initial_mode = *m;
  });
  r.flag("record_timing", run.record_timing);

  ControllerSettings& ctl = run.controller;
  r.count("breakpoints", ctl.breakpoints);
  r.number("omega_plus", ctl.omega_plus);
  r.number("omega_minus", ctl.omega_minus);
  r.count("node_limit", ctl.solve.node_limit);
  r.with("time_limit_s", [&](const std::string& v) {
    ctl.solve.time_limit_s = v == "inf" ? std::numeric_limits<double>::infinity() : parse_double(v, "time_limit_s");
  });
  r.flag("sos2_branching", ctl.solve.sos2_branching);
  r.with("external_solver", [&](const std::string& v) {
    ExternalSolverProfile profile;
    profile.command = v;
    ctl.external = profile;
  });

  r.number("p_e_max", pp.p_e_max);
  r.number("p_el_min", pp.p_el_min);
  r.number("p_el_max", pp.p_el_max);
  r.number("p_f_min", pp.p_f_min);
  r.number("p_f_max", pp.p_f_max);
  r.number("p_tilde_el", pp.p_tilde_el);
  r.number("p_tilde_f", pp.p_tilde_f);
  r.number("e_h", pp.e_h);
  r.number("h_min", pp.h_min);
  r.number("h_max", pp.h_max);
  r.integer("n_cells", pp.n_cells);
  r.number("theta", pp.theta);
  r.number("delta_t", pp.delta_t);
  r.integer("max_switches", pp.max_switches);
  r.integer("switch_window", pp.switch_window);
  r.number("c_m", pp.c_m);
  r.number("c_r", pp.c_r);
  r.number("alpha1", pp.alpha1);
  r.number("alpha2", pp.alpha2);
  r.number("alpha3", pp.alpha3);
  r.number("beta1", pp.beta1);
  r.number("beta2", pp.beta2);
  r.number("beta3", pp.beta3);

  try {
    pp.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("plant parameters: {}", e.what()));
  }
  if (run.horizon < 1) throw ConfigError("config key 'horizon': must be >= 1");
  if (run.scenarios < 1) throw ConfigError("config key 'scenarios': must be >= 1");
  if (run.samples < run.scenarios) throw ConfigError("config key 'samples': must be >= scenarios");
  if (ctl.breakpoints < 3) throw ConfigError("config key 'breakpoints': must be >= 3");
  if (!(run.tau > 0.0)) throw ConfigError("config key 'tau': must be > 0");
  if (!(run.initial_soh >= pp.h_min && run.initial_soh <= pp.h_max))
    throw ConfigError("config key 'initial_soh': outside [h_min, h_max]");

  if (check_files) {
    for (const auto& [key, p] : {std::pair<std::string, const fs::path*>{"history_csv", &cfg.history_csv},
                                 {"actuals_csv", &cfg.actuals_csv},
                                 {"prices_csv", &cfg.prices_csv},
                                 {"graph_file", &cfg.graph_file}}) {
      if (r.has(key) && !fs::exists(*p))
        throw ConfigError(fmt::format("config key '{}': file {} does not exist", key, p->string()));
    }
  }
  return cfg;
}

AppConfig load_config(const fs::path& path, bool check_files) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  return parse_config(in, path.parent_path(), check_files);
}

void write_config_template(std::ostream& out) {
  for (const ConfigKey& k : config_keys()) {
    out << fmt::format("# {} [{}]\n", k.description, k.unit);
    if (k.default_value.empty())
      out << fmt::format("# {} =\n", k.name);
    else
      out << fmt::format("{} = {}\n", k.name, k.default_value);
  }
}

}  // namespace rfcmpc
