#include "rfcmpc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/numfmt.hpp"
#include "rfcmpc/scenario_reduction.hpp"

namespace rfcmpc {

namespace {

struct Window {
  Timestamp start;
  std::size_t steps;
  std::size_t actual0;  // actuals index of start
  std::size_t price0;   // prices index of start
};

Window resolve_window(const RunConfig& cfg, const PowerSeries& actuals, const PriceSeries& prices) {
  if (actuals.size() == 0) throw InputError("simulate: no actuals");
  if (prices.size() == 0) throw InputError("simulate: no prices");
  if (cfg.horizon < 1) throw InputError("simulate: horizon must be >= 1");
  if (std::abs(cfg.params.delta_t * 3600.0 - static_cast<double>(kStepSeconds)) > 1e-9)
    throw InputError("simulate: delta_t must match the 15-minute data grid (0.25 h)");
  const auto lookahead = static_cast<Timestamp>(cfg.horizon - 1) * kStepSeconds;
  const Timestamp start = cfg.start.value_or(actuals.time.front());
  const Timestamp data_end = std::min(actuals.time.back(), prices.time.back()) + kStepSeconds;
  const Timestamp end = cfg.end.value_or(data_end - lookahead);
  if (end <= start) throw InputError("simulate: end must be after start");
  if ((end - start) % kStepSeconds != 0) throw InputError("simulate: [start, end) is not a whole number of steps");
  const auto a0 = actuals.index_of(start);
  const auto p0 = prices.index_of(start);
  if (!a0) throw InputError(fmt::format("simulate: actuals do not contain start {}", format_timestamp(start)));
  if (!p0) throw InputError(fmt::format("simulate: prices do not contain start {}", format_timestamp(start)));
  const Timestamp last_needed = end - kStepSeconds + lookahead;
  if (!actuals.index_of(last_needed))
    throw InputError(fmt::format("simulate: actuals must extend to {} (end + horizon)", format_timestamp(last_needed)));
  if (!prices.index_of(last_needed))
    throw InputError(fmt::format("simulate: prices must extend to {} (end + horizon)", format_timestamp(last_needed)));
  return {start, static_cast<std::size_t>((end - start) / kStepSeconds), *a0, *p0};
}

ScenarioSet forecast_scenarios(const RunConfig& cfg, const DmcGraph& graph, const Observation& previous,
                               const PowerSeries& actuals, std::size_t ai, std::size_t step) {
  const std::size_t T = cfg.horizon;
  if (cfg.forecast == ForecastMode::Perfect) {
    ScenarioSet set;
    JointPath p;
    p.load.assign(actuals.load.begin() + static_cast<std::ptrdiff_t>(ai),
                  actuals.load.begin() + static_cast<std::ptrdiff_t>(ai + T));
    p.res.assign(actuals.res.begin() + static_cast<std::ptrdiff_t>(ai),
                 actuals.res.begin() + static_cast<std::ptrdiff_t>(ai + T));
    set.scenarios.push_back(std::move(p));
    set.probabilities.push_back(1.0);
    set.source_index.push_back(0);
    return set;
  }
  std::vector<JointPath> paths = sample_paths(graph, previous, T, cfg.samples, cfg.seed + step);
  for (JointPath& p : paths) {
    p.load.erase(p.load.begin());
    p.res.erase(p.res.begin());
  }
  return reduce(paths, std::min(cfg.scenarios, paths.size()));
}

StepTrace baseline_step(const PlantParams& pp, const Observation& actual, double price, double soh) {
  StepTrace st;
  st.rfc = false;
  AppliedDecision& a = st.applied;
  a.p_e = std::min(actual.res, pp.p_e_max);
  a.curtailed = actual.res - a.p_e;
  a.p_ac = std::min(a.p_e, actual.load);
  a.gamma = actual.load - a.p_ac;
  a.soh_after = soh;
  st.soh = soh;
  st.income = income_step(a.p_ac, a.p_e, price, pp);
  return st;
}

RunResult run_impl(const RunConfig& cfg, DmcGraph graph, std::optional<Observation> previous,
                   const PowerSeries& actuals, const PriceSeries& prices) {
  cfg.params.validate();
  const Window w = resolve_window(cfg, actuals, prices);
  if (!previous) {
    if (w.actual0 > 0)
      previous = actuals.at(w.actual0 - 1);
    else if (graph.last_state())
      previous = Observation{graph.states()[*graph.last_state()].mean[0], graph.states()[*graph.last_state()].mean[1]};
    else if (cfg.rfc_enabled && cfg.forecast == ForecastMode::Markov)
      throw InputError("simulate: no observation precedes the start and the chain is empty");
    else
      previous = actuals.at(w.actual0);
  }

  PlantState state;
  state.soh = cfg.initial_soh;
  state.mode = cfg.initial_mode;
  RunResult result;
  result.trace.reserve(w.steps);

  for (std::size_t i = 0; i < w.steps; ++i) {
    const std::size_t ai = w.actual0 + i;
    const std::size_t pi = w.price0 + i;
    const Timestamp t = w.start + static_cast<Timestamp>(i) * kStepSeconds;
    const Observation actual = actuals.at(ai);
    const Observation prev = i == 0 ? *previous : actuals.at(ai - 1);
    if (!cfg.rfc_enabled) {
      StepTrace st = baseline_step(cfg.params, actual, prices.price[pi], state.soh);
      st.time = t;
      st.p_load = actual.load;
      st.p_res = actual.res;
      result.trace.push_back(std::move(st));
      continue;
    }
    try {
      const ScenarioSet set = forecast_scenarios(cfg, graph, prev, actuals, ai, i);
      const std::span<const double> price_window(prices.price.data() + pi, cfg.horizon);
      const PlanOutcome outcome = plan_step(state, set, price_window, cfg.params, cfg.controller);
      const PlannedStep& first = outcome.plan.steps.front();

      StepTrace st;
      st.time = t;
      st.p_load = actual.load;
      st.p_res = actual.res;
      for (std::size_t s = 0; s < set.size(); ++s) {
        st.forecast_load += set.probabilities[s] * set.scenarios[s].load[0];
        st.forecast_res += set.probabilities[s] * set.scenarios[s].res[0];
      }
      st.applied = compensate(first, actual.res, actual.load, state, cfg.params);
      for (std::size_t s = 0; s < set.size(); ++s) {
        const double p = set.probabilities[s];
        st.applied.xi_plus += p * first.xi_plus[s];
        st.applied.xi_minus += p * first.xi_minus[s];
        st.applied.chi_plus += p * first.chi_plus[s];
        st.applied.chi_minus += p * first.chi_minus[s];
      }
      st.soh = st.applied.soh_after;
      st.income = income_step(st.applied.p_ac, st.applied.p_e, prices.price[pi], cfg.params);
      st.planned_income = first.income;
      st.solve_ms = cfg.record_timing ? outcome.solve_seconds * 1000.0 : 0.0;
      st.nodes = outcome.nodes;
      st.status = outcome.status;

      state.soh = st.soh;
      state.record(st.applied.mode, cfg.params);
      if (cfg.online_learning && cfg.forecast == ForecastMode::Markov) graph.ingest(actual);
      result.trace.push_back(std::move(st));
    } catch (const std::exception& e) {
      StepFailure::Cause cause = StepFailure::Cause::Input;
      if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const BridgeError*>(&e))
        cause = StepFailure::Cause::Solver;
      else if (dynamic_cast<const IntegrityError*>(&e))
        cause = StepFailure::Cause::Integrity;
      throw StepFailure(i, t, cause, fmt::format("step {} ({}): {}", i, format_timestamp(t), e.what()),
                        std::move(result.trace));
    }
  }
  result.kpis = compute_kpis(result.trace, cfg.params);
  return result;
}

}  // namespace

RunResult run(const RunConfig& config, const PowerSeries& history, const PowerSeries& actuals,
              const PriceSeries& prices) {
  const Timestamp start = config.start.value_or(actuals.size() ? actuals.time.front() : 0);
  std::vector<Observation> training;
  std::optional<Observation> previous;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history.time[i] >= start) break;
    training.push_back(history.at(i));
    if (history.time[i] == start - kStepSeconds) previous = history.at(i);
  }
  DmcGraph graph;
  if (!training.empty()) graph = train(training, config.tau);
  else if (config.rfc_enabled && config.forecast == ForecastMode::Markov)
    throw InputError("simulate: no history rows precede the start");
  // An actuals row right before the start takes precedence.
  if (const auto a0 = actuals.index_of(start); a0 && *a0 > 0) previous.reset();
  return run_impl(config, std::move(graph), previous, actuals, prices);
}

RunResult run(const RunConfig& config, DmcGraph graph, const PowerSeries& actuals,
              const PriceSeries& prices) {
  return run_impl(config, std::move(graph), std::nullopt, actuals, prices);
}

double kpi_income(std::span<const StepTrace> trace) {
  double total = 0.0;
  for (const StepTrace& s : trace) total += s.income;
  return total;
}

Kpis compute_kpis(std::span<const StepTrace> trace, const PlantParams& params) {
  Kpis k;
  k.steps = trace.size();
  k.total_income = kpi_income(trace);
  const double dt = params.delta_t;
  double recourse = 0.0;
  for (const StepTrace& s : trace) {
    const AppliedDecision& a = s.applied;
    if (s.rfc && is_transition(a.mode)) ++k.switch_count;
    k.curtailed_kwh += a.curtailed * dt;
    recourse += a.xi_plus + a.xi_minus + a.chi_plus + a.chi_minus;
    k.flagged_steps += a.flagged ? 1 : 0;
    k.max_abs_residual_kw = std::max(k.max_abs_residual_kw, std::abs(a.residual));
    k.res_kwh += s.p_res * dt;
    k.exported_kwh += a.p_e * dt;
    k.rfc_kwh += a.p_r * dt;
    k.shared_kwh += a.p_ac * dt;
    k.limit_solves += s.status == SolveStatus::Limit ? 1 : 0;
  }
  if (!trace.empty()) {
    k.mean_recourse_kw = recourse / static_cast<double>(trace.size());
    k.soh_end = trace.back().soh;
    k.soh_min = k.soh_max = trace.front().soh;
    for (const StepTrace& s : trace) {
      k.soh_min = std::min(k.soh_min, s.soh);
      k.soh_max = std::max(k.soh_max, s.soh);
    }
  }
  return k;
}

void write_trace_csv(std::span<const StepTrace> trace, std::ostream& out) {
  out << "timestamp,p_load,p_res,p_e,p_el,p_f,p_r,p_ac,mode,soh,income_eur,xi_plus,xi_minus,chi_plus,"
         "chi_minus,solve_ms\n";
  for (const StepTrace& s : trace) {
    const AppliedDecision& a = s.applied;
    out << format_timestamp(s.time) << ',' << format_exact(s.p_load) << ',' << format_exact(s.p_res) << ','
        << format_exact(a.p_e) << ',' << format_exact(a.p_el) << ',' << format_exact(a.p_f) << ','
        << format_exact(a.p_r) << ',' << format_exact(a.p_ac) << ','
        << (s.rfc ? std::string(to_string(a.mode)) : std::string("NONE")) << ',' << format_exact(s.soh)
        << ',' << format_exact(s.income) << ',' << format_exact(a.xi_plus) << ','
        << format_exact(a.xi_minus) << ',' << format_exact(a.chi_plus) << ','
        << format_exact(a.chi_minus) << ',' << format_exact(s.solve_ms) << '\n';
  }
}

void write_kpis(const Kpis& k, std::ostream& out) {
  out << "steps: " << k.steps << '\n'
      << "total_income_eur: " << fmt::format("{:.6f}", k.total_income) << '\n'
      << "switch_count: " << k.switch_count << '\n'
      << "curtailed_kwh: " << fmt::format("{:.6f}", k.curtailed_kwh) << '\n'
      << "mean_recourse_kw: " << fmt::format("{:.6f}", k.mean_recourse_kw) << '\n'
      << "flagged_steps: " << k.flagged_steps << '\n'
      << "max_abs_residual_kw: " << fmt::format("{:.3e}", k.max_abs_residual_kw) << '\n'
      << "res_kwh: " << fmt::format("{:.6f}", k.res_kwh) << '\n'
      << "exported_kwh: " << fmt::format("{:.6f}", k.exported_kwh) << '\n'
      << "rfc_kwh: " << fmt::format("{:.6f}", k.rfc_kwh) << '\n'
      << "shared_kwh: " << fmt::format("{:.6f}", k.shared_kwh) << '\n'
      << "soh_end: " << fmt::format("{:.9f}", k.soh_end) << '\n'
      << "soh_min: " << fmt::format("{:.9f}", k.soh_min) << '\n'
      << "soh_max: " << fmt::format("{:.9f}", k.soh_max) << '\n'
      << "limit_solves: " << k.limit_solves << '\n';
}

}  // namespace rfcmpc
