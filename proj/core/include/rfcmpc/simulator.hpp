#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfcmpc/forecaster.hpp"
#include "rfcmpc/mpc_controller.hpp"
#include "rfcmpc/timeseries.hpp"

namespace rfcmpc {

enum class ForecastMode {
  Markov,   // sample the chain, reduce to S scenarios
  Perfect,  // a single scenario equal to the actual future
};

struct RunConfig {
  std::optional<Timestamp> start;  // default: first actuals row
  std::optional<Timestamp> end;    // exclusive; default: last step with a full horizon of data
  std::size_t horizon = 96;
  std::size_t scenarios = 10;
  std::size_t samples = 300;
  std::uint64_t seed = 1;
  double tau = 0.1;
  ForecastMode forecast = ForecastMode::Markov;
  bool rfc_enabled = true;
  double initial_soh = 0.5;
  Mode initial_mode = Mode::Soec;
  bool record_timing = false;  // fill solve_ms; off keeps traces byte-identical across runs
  bool online_learning = true;  // ingest each realized observation into the chain
  PlantParams params;
  ControllerSettings controller;
};

struct StepTrace {
  Timestamp time = 0;
  double p_load = 0.0, p_res = 0.0;
  double forecast_load = 0.0, forecast_res = 0.0;  // probability-weighted k = 0 forecast
  bool rfc = true;                                  // false in the no-RFC baseline
  AppliedDecision applied;
  double soh = 0.0;  // after the step
  double income = 0.0;
  double planned_income = 0.0;  // first-stage value of k = 0 at plan time
  double solve_ms = 0.0;
  std::size_t nodes = 0;
  SolveStatus status = SolveStatus::Optimal;
};

struct Kpis {
  std::size_t steps = 0;
  double total_income = 0.0;  // EUR
  std::size_t switch_count = 0;  // transition-mode activations
  double curtailed_kwh = 0.0;
  double mean_recourse_kw = 0.0;  // mean of expected k = 0 |xi| + |chi|
  std::size_t flagged_steps = 0;
  double max_abs_residual_kw = 0.0;
  double res_kwh = 0.0;
  double exported_kwh = 0.0;
  double rfc_kwh = 0.0;  // net RFC consumption, P^r integrated
  double shared_kwh = 0.0;
  double soh_end = 0.0;
  double soh_min = 0.0;
  double soh_max = 0.0;
  std::size_t limit_solves = 0;
};

struct RunResult {
  std::vector<StepTrace> trace;
  Kpis kpis;
};

/// A step failed. Carries the trace up to (not including) the failing step.
class StepFailure : public std::runtime_error {
 public:
  enum class Cause { Input, Solver, Integrity };

  StepFailure(std::size_t step, Timestamp time, Cause cause, const std::string& what,
              std::vector<StepTrace> partial)
      : std::runtime_error(what), step(step), time(time), cause(cause), partial(std::move(partial)) {}
  std::size_t step;
  Timestamp time;
  Cause cause;
  std::vector<StepTrace> partial;
};

/// Closed-loop run over [start, end). `history` trains the chain (rows before
/// start are used); `actuals` and `prices` must cover [start, end + (T-1) step].
/// Throws InputError for inconsistent series and StepFailure for step errors.
RunResult run(const RunConfig& config, const PowerSeries& history, const PowerSeries& actuals,
              const PriceSeries& prices);

/// Same, with a pre-trained chain.
RunResult run(const RunConfig& config, DmcGraph graph, const PowerSeries& actuals,
              const PriceSeries& prices);

double kpi_income(std::span<const StepTrace> trace);
Kpis compute_kpis(std::span<const StepTrace> trace, const PlantParams& params);

void write_trace_csv(std::span<const StepTrace> trace, std::ostream& out);
void write_kpis(const Kpis& kpis, std::ostream& out);

}  // namespace rfcmpc
