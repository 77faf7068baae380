#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "rfcmpc/config.hpp"
#include "rfcmpc/errors.hpp"
#include "rfcmpc/forecaster.hpp"
#include "rfcmpc/mpc_controller.hpp"
#include "rfcmpc/mps_io.hpp"
#include "rfcmpc/numfmt.hpp"
#include "rfcmpc/scenario_reduction.hpp"
#include "rfcmpc/simulator.hpp"
#include "rfcmpc/snapshot.hpp"
#include "rfcmpc/synthetic.hpp"

namespace rfcmpc::cli {

namespace fs = std::filesystem;

namespace {

AppConfig load(const Common& common) {
  AppConfig cfg = load_config(common.config);
  if (common.seed) cfg.run.seed = *common.seed;
  if (common.out_dir) cfg.out_dir = *common.out_dir;
  if (common.external_solver) {
    ExternalSolverProfile profile;
    profile.command = *common.external_solver;
    cfg.run.controller.external = profile;
  }
  return cfg;
}

const fs::path& require(const fs::path& p, const char* key) {
  if (p.empty()) throw ConfigError(fmt::format("config key '{}' is required for this command", key));
  return p;
}

std::ofstream create(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path);
  if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
  return out;
}

DmcGraph read_graph(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open graph {}", path.string()));
  return DmcGraph::read(in);
}

/// Observation of the quarter-hour before `t`, from history or actuals.
Observation observation_before(const AppConfig& cfg, Timestamp t) {
  for (const fs::path& p : {cfg.actuals_csv, cfg.history_csv}) {
    if (p.empty()) continue;
    const PowerSeries s = read_power_csv(p);
    if (const auto i = s.index_of(t - kStepSeconds)) return s.at(*i);
  }
  throw InputError(fmt::format("no observation at {} in history or actuals", format_timestamp(t - kStepSeconds)));
}

std::vector<JointPath> read_paths_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::string line;
  std::getline(in, line);
  if (line != "path,step,load_kw,pv_kw") throw InputError(fmt::format("{}: unexpected header", path.string()));
  std::vector<JointPath> paths;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& x : f) std::getline(ss, x, ',');
    const auto p = static_cast<std::size_t>(parse_int(f[0], "path"));
    const auto k = static_cast<std::size_t>(parse_int(f[1], "step"));
    if (p == paths.size()) paths.emplace_back();
    if (p + 1 != paths.size() || k != paths.back().size())
      throw InputError(fmt::format("{} line {}: rows must be ordered by path and step", path.string(), line_no));
    paths.back().load.push_back(parse_double(f[2], "load_kw"));
    paths.back().res.push_back(parse_double(f[3], "pv_kw"));
  }
  if (paths.empty()) throw InputError(fmt::format("{}: no paths", path.string()));
  return paths;
}

std::string kpi_text(const Kpis& k) {
  std::ostringstream os;
  write_kpis(k, os);
  return os.str();
}

}  // namespace

int train(const Common& common, const TrainArgs& args) {
  const AppConfig cfg = load(common);
  const fs::path history = args.history ? *args.history : require(cfg.history_csv, "history_csv");
  const PowerSeries series = read_power_csv(history);
  const DmcGraph graph = rfcmpc::train(series.observations(), args.tau.value_or(cfg.run.tau));
  auto out = create(cfg.out_dir, args.output);
  graph.write(out);
  std::cout << fmt::format("observations: {}\nstates: {}\nedges: {}\ngraph: {}\n", series.size(),
                           graph.states().size(), graph.edge_count(), (cfg.out_dir / args.output).string());
  return 0;
}

int forecast(const Common& common, const ForecastArgs& args) {
  const AppConfig cfg = load(common);
  const Timestamp at = parse_timestamp(args.at);
  DmcGraph graph;
  if (args.graph) {
    graph = read_graph(*args.graph);
  } else {
    const PowerSeries history = read_power_csv(require(cfg.history_csv, "history_csv"));
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < history.size() && history.time[i] < at; ++i) obs.push_back(history.at(i));
    if (obs.empty()) throw InputError("forecast: no history precedes --at");
    graph = rfcmpc::train(obs, cfg.run.tau);
  }
  const Observation current = observation_before(cfg, at);
  const auto paths = sample_paths(graph, current, cfg.run.horizon, cfg.run.samples, cfg.run.seed);
  auto out = create(cfg.out_dir, args.output);
  out << "path,step,load_kw,pv_kw\n";
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (std::size_t k = 0; k < paths[p].size(); ++k)
      out << p << ',' << k << ',' << format_exact(paths[p].load[k]) << ',' << format_exact(paths[p].res[k]) << '\n';
  std::cout << fmt::format("paths: {}\nhorizon: {}\nfile: {}\n", paths.size(), cfg.run.horizon,
                           (cfg.out_dir / args.output).string());
  return 0;
}

int reduce_scenarios(const Common& common, const ReduceArgs& args) {
  const AppConfig cfg = load(common);
  std::vector<JointPath> paths = read_paths_csv(args.paths);
  for (JointPath& p : paths) {
    if (p.size() < 2) throw InputError("reduce-scenarios: paths need the current observation plus a horizon");
    p.load.erase(p.load.begin());
    p.res.erase(p.res.begin());
  }
  const ScenarioSet set = reduce(paths, std::min(cfg.run.scenarios, paths.size()));
  auto out = create(cfg.out_dir, args.output);
  out << "scenario,source_path,probability,step,load_kw,pv_kw\n";
  for (std::size_t s = 0; s < set.size(); ++s)
    for (std::size_t k = 0; k < set.horizon(); ++k)
      out << s << ',' << set.source_index[s] << ',' << format_exact(set.probabilities[s]) << ',' << k << ','
          << format_exact(set.scenarios[s].load[k]) << ',' << format_exact(set.scenarios[s].res[k]) << '\n';
  std::cout << fmt::format("scenarios: {}\nfile: {}\n", set.size(), (cfg.out_dir / args.output).string());
  if (args.at) {
    const Timestamp at = parse_timestamp(*args.at);
    const PriceSeries prices = read_price_csv(require(cfg.prices_csv, "prices_csv"));
    const auto i = prices.index_of(at);
    if (!i || *i + set.horizon() > prices.size())
      throw InputError(fmt::format("prices do not cover {} steps from {}", set.horizon(), *args.at));
    Snapshot snap;
    snap.state.soh = cfg.run.initial_soh;
    snap.state.mode = cfg.run.initial_mode;
    snap.prices.assign(prices.price.begin() + static_cast<std::ptrdiff_t>(*i),
                       prices.price.begin() + static_cast<std::ptrdiff_t>(*i + set.horizon()));
    snap.scenarios = set;
    auto snap_out = create(cfg.out_dir, "snapshot.txt");
    write_snapshot(snap, snap_out);
    std::cout << fmt::format("snapshot: {}\n", (cfg.out_dir / "snapshot.txt").string());
  }
  return 0;
}

int solve_once(const Common& common, const SolveOnceArgs& args) {
  const AppConfig cfg = load(common);
  std::ifstream in(args.snapshot);
  if (!in) throw InputError(fmt::format("cannot open snapshot {}", args.snapshot.string()));
  const Snapshot snap = read_snapshot(in);
  const ControllerSettings& ctl = cfg.run.controller;
  const StageModel stage = build(make_stage_data(snap.state, snap.scenarios, snap.prices, cfg.run.params, ctl));
  for (const auto& w : stage.warnings) std::cerr << "warning: " << w << '\n';
  if (args.export_mps) {
    if (args.export_mps->has_parent_path()) fs::create_directories(args.export_mps->parent_path());
    std::ofstream mps(*args.export_mps);
    if (!mps) throw InputError(fmt::format("cannot write {}", args.export_mps->string()));
    write_mps(stage.model, mps);
  }
  SolveOptions options = ctl.solve;
  options.branch_priority = stage.branch_priority();
  const Solution sol = ctl.external ? solve_external(stage.model, *ctl.external) : solve(stage.model, options);
  std::cout << fmt::format("status: {}\nnodes: {}\nrows: {}\ncolumns: {}\nbinaries: {}\n", to_string(sol.status),
                           sol.nodes, stage.model.num_constraints(), stage.model.num_variables(),
                           stage.model.num_binaries());
  if (!sol.has_values())
    throw SolverError(fmt::format("stage problem has no solution: {}{}", to_string(sol.status),
                                  sol.message.empty() ? "" : " (" + sol.message + ")"));
  if (sol.status == SolveStatus::Limit)
    std::cout << fmt::format("dual_bound: {}\nnote: best incumbent at the limit ({})\n", format_exact(sol.dual_bound),
                             sol.message);
  const StagePlan plan = extract(stage, sol.values);
  auto out = create(cfg.out_dir, args.output);
  out << "step,mode,p_e,p_el,p_f,p_r,p_ac,gamma,phi_el,phi_f,soh,soh_exact,income_eur,xi_plus,xi_minus,chi_plus,"
         "chi_minus\n";
  for (std::size_t k = 0; k < plan.steps.size(); ++k) {
    const PlannedStep& s = plan.steps[k];
    double xp = 0, xm = 0, cp = 0, cm = 0;
    for (std::size_t j = 0; j < s.xi_plus.size(); ++j) {
      const double p = snap.scenarios.probabilities[j];
      xp += p * s.xi_plus[j];
      xm += p * s.xi_minus[j];
      cp += p * s.chi_plus[j];
      cm += p * s.chi_minus[j];
    }
    out << k << ',' << to_string(s.mode) << ',' << format_exact(s.p_e) << ',' << format_exact(s.p_el) << ','
        << format_exact(s.p_f) << ',' << format_exact(s.p_r) << ',' << format_exact(s.p_ac) << ','
        << format_exact(s.gamma) << ',' << format_exact(s.phi_el) << ',' << format_exact(s.phi_f) << ','
        << format_exact(plan.soh[k + 1]) << ',' << format_exact(plan.soh_exact[k + 1]) << ','
        << format_exact(s.income) << ',' << format_exact(xp) << ',' << format_exact(xm) << ','
        << format_exact(cp) << ',' << format_exact(cm) << '\n';
  }
  std::cout << fmt::format("objective: {}\nfirst_stage_income_eur: {}\nmax_linearization_gap_kw: {:.6g}\nplan: {}\n",
                           format_exact(plan.objective), format_exact(plan.first_stage_income),
                           plan.max_linearization_gap, (cfg.out_dir / args.output).string());
  return 0;
}

int simulate(const Common& common, const SimulateArgs& args) {
  const AppConfig cfg = load(common);
  const PowerSeries actuals = read_power_csv(require(cfg.actuals_csv, "actuals_csv"));
  const PriceSeries prices = read_price_csv(require(cfg.prices_csv, "prices_csv"));
  std::optional<DmcGraph> graph;
  std::optional<PowerSeries> history;
  if (!cfg.graph_file.empty()) graph = read_graph(cfg.graph_file);
  else if (!cfg.history_csv.empty()) history = read_power_csv(cfg.history_csv);

  auto execute = [&](RunConfig run, const std::string& suffix) {
    try {
      RunResult r = graph ? rfcmpc::run(run, *graph, actuals, prices)
                          : rfcmpc::run(run, history.value_or(PowerSeries{}), actuals, prices);
      auto trace = create(cfg.out_dir, "trace" + suffix + ".csv");
      write_trace_csv(r.trace, trace);
      auto kpi = create(cfg.out_dir, "kpi" + suffix + ".txt");
      write_kpis(r.kpis, kpi);
      return r;
    } catch (StepFailure& e) {
      auto partial = create(cfg.out_dir, "trace" + suffix + "_partial.csv");
      write_trace_csv(e.partial, partial);
      std::cerr << fmt::format("partial trace ({} steps) written to {}\n", e.partial.size(),
                               (cfg.out_dir / ("trace" + suffix + "_partial.csv")).string());
      throw;
    }
  };

  const std::string main_suffix = cfg.run.rfc_enabled ? "" : "_no_rfc";
  const RunResult main = execute(cfg.run, main_suffix);
  std::cout << kpi_text(main.kpis);
  if (args.compare && cfg.run.rfc_enabled) {
    RunConfig base = cfg.run;
    base.rfc_enabled = false;
    const RunResult baseline = execute(base, "_no_rfc");
    auto cmp = create(cfg.out_dir, "comparison.txt");
    const std::string text = fmt::format(
        "income_with_rfc_eur: {:.6f}\nincome_without_rfc_eur: {:.6f}\ndifference_eur: {:.6f}\n",
        main.kpis.total_income, baseline.kpis.total_income, main.kpis.total_income - baseline.kpis.total_income);
    cmp << text;
    std::cout << text;
  }
  return 0;
}

int generate_data(const Common& common, const GenerateArgs& args) {
  if (args.history_days < 1 || args.days < 1) throw InputError("generate-data: day counts must be >= 1");
  const fs::path dir = common.out_dir.value_or("data");
  const Timestamp start = parse_timestamp(args.start);
  const Timestamp first = start - static_cast<Timestamp>(args.history_days) * 86400;
  const auto hist_steps = static_cast<std::size_t>(args.history_days) * 96;
  const auto act_steps = static_cast<std::size_t>(args.days) * 96;
  const SyntheticSite site;
  const PowerSeries all = synthetic_power(site, first, hist_steps + act_steps, args.seed);
  PowerSeries history, actuals;
  for (std::size_t i = 0; i < all.size(); ++i)
    (i < hist_steps ? history : actuals).push_back(all.time[i], all.load[i], all.res[i]);
  auto h = create(dir, "history.csv");
  write_power_csv(history, h);
  auto a = create(dir, "actuals.csv");
  write_power_csv(actuals, a);
  auto p = create(dir, "prices.csv");
  write_price_csv(synthetic_prices(site, first, hist_steps + act_steps), p);
  std::cout << fmt::format("history: {} rows\nactuals: {} rows\nprices: {} rows\ndir: {}\n", history.size(),
                           actuals.size(), hist_steps + act_steps, dir.string());
  return 0;
}

int config_template() {
  write_config_template(std::cout);
  return 0;
}

}  // namespace rfcmpc::cli
