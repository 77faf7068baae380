#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfcmpc/external_solver.hpp"
#include "rfcmpc/milp_solver.hpp"
#include "rfcmpc/plant_model.hpp"
#include "rfcmpc/scenario_reduction.hpp"
#include "rfcmpc/stage_problem.hpp"

namespace rfcmpc {

struct ControllerSettings {
  std::size_t breakpoints = 8;
  double omega_plus = 1.0;
  double omega_minus = 1.0;
  SolveOptions solve;
  std::optional<ExternalSolverProfile> external;
};

struct PlanOutcome {
  StagePlan plan;
  SolveStatus status = SolveStatus::Optimal;  // Limit: best incumbent was used
  std::size_t nodes = 0;
  double solve_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Stage data for one step with the controller's breakpoint tables.
StageData make_stage_data(const PlantState& state, const ScenarioSet& scenarios,
                          std::span<const double> prices, const PlantParams& params,
                          const ControllerSettings& settings);

/// Build and solve the stage problem. A node limit reached before any
/// incumbent is retried with ten and then a hundred times the limit. Throws
/// SolverError when no plan is available (infeasible, unbounded, or a limit
/// without an incumbent).
PlanOutcome plan_step(const PlantState& state, const ScenarioSet& scenarios,
                      std::span<const double> prices, const PlantParams& params,
                      const ControllerSettings& settings = {});

/// The decision actually applied during one step.
struct AppliedDecision {
  Mode mode = Mode::Soec;
  double p_e = 0.0, p_el = 0.0, p_f = 0.0, p_r = 0.0, p_ac = 0.0;
  double gamma = 0.0;  // load not covered by shared energy, kW
  // Probability-weighted recourse of the plan at k = 0, kW.
  double xi_plus = 0.0, xi_minus = 0.0, chi_plus = 0.0, chi_minus = 0.0;
  double phi_el = 0.0, phi_f = 0.0;  // exact hydrogen flows, kW
  double soh_after = 0.0;
  double curtailed = 0.0;  // RES left unused, kW
  double residual = 0.0;   // RES - curtailed - (P^r + P^e); nonzero only when flagged
  bool flagged = false;
  std::string diagnostic;
};

/// Move the planned k = 0 powers onto the realized RES and load. The mode is
/// kept. Surplus goes to export, then to SOEC power, then is curtailed;
/// deficit is taken from the plant first (SOEC toward its minimum, SOFC up to
/// its tank limit), then from export. Tank bounds are enforced with exact g.
AppliedDecision compensate(const PlannedStep& planned, double actual_res, double actual_load,
                           const PlantState& state, const PlantParams& params);

/// Largest power in [lo, hi] for which `fits(p)` holds, assuming `fits` is
/// monotone (true up to a point). Returns nullopt when `fits(lo)` is false.
template <class Pred>
std::optional<double> largest_feasible(double lo, double hi, Pred fits) {
  if (!fits(lo)) return std::nullopt;
  if (fits(hi)) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace rfcmpc
