#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rfcmpc/milp_model.hpp"
#include "rfcmpc/plant_model.hpp"
#include "rfcmpc/scenario_reduction.hpp"

namespace rfcmpc {

enum class Curve { El, F };

enum class BreakpointLayout {
  /// {0} plus L-1 uniformly spaced points over the operating range.
  Uniform,
  /// Uniform, plus a duplicated abscissa carrying both one-sided values
  /// wherever the efficiency curve jumps inside the operating range. The
  /// interpolant then matches both branches on either side of the jump.
  SplitDiscontinuity,
};

/// Piecewise-linear table of g over {0} U [P_min, P_max]. `power` is
/// nondecreasing; it repeats only at a split discontinuity.
struct BreakpointTable {
  std::vector<double> power;
  std::vector<double> phi;

  std::size_t size() const { return power.size(); }
  /// Interpolated phi at `p` (first matching segment; left value at a split).
  double interpolate(double p) const;
};

BreakpointTable breakpoint_table(Curve curve, std::size_t breakpoints, const PlantParams& params,
                                 BreakpointLayout layout = BreakpointLayout::Uniform);

/// Largest |interpolated - exact g| over `samples` evenly spaced points of
/// the operating range (endpoints and any jump abscissa included).
double max_interpolation_error(const BreakpointTable& table, Curve curve,
                               const PlantParams& params, std::size_t samples);

/// Everything known at the start of one MPC step.
struct StageData {
  ScenarioSet scenarios;      // S paths of length T (k = 0..T-1)
  std::vector<double> prices; // c_e per step, at least T entries
  PlantState state;           // SoH H_t, previously applied mode, recent modes
  PlantParams params;
  BreakpointTable el_table;
  BreakpointTable f_table;
  double omega_plus = 1.0;
  double omega_minus = 1.0;

  std::size_t horizon() const { return scenarios.horizon(); }
};

/// Column ids of one time step inside the built model.
struct StepColumns {
  std::size_t p_e, p_el, p_f, p_ac, gamma;
  std::size_t d_el, d_f, d_tel, d_tf;  // SOEC, SOFC, T_SOEC, T_SOFC
  std::size_t soh_next;                // H_{k+1}
  std::vector<std::size_t> lambda_el, lambda_f;
  std::vector<std::size_t> segment_el, segment_f;
  std::vector<std::size_t> xi_plus, xi_minus, chi_plus, chi_minus;  // per scenario
};

struct StageModel {
  MilpModel model;
  std::vector<StepColumns> steps;
  StageData data;
  std::vector<std::string> warnings;

  std::size_t mode_binary(std::size_t k, Mode m) const;
  /// Solver priorities: mode binaries above segment binaries.
  std::vector<int> branch_priority() const;
};

/// Assemble the two-stage stochastic program for one MPC step.
/// Throws BuildError for data that admits no feasible model.
StageModel build(const StageData& data);

struct PlannedStep {
  Mode mode = Mode::Soec;
  double p_e = 0.0, p_el = 0.0, p_f = 0.0, p_r = 0.0, p_ac = 0.0, gamma = 0.0;
  double phi_el = 0.0, phi_f = 0.0;  // interpolated hydrogen flows
  std::vector<double> xi_plus, xi_minus, chi_plus, chi_minus;
  double income = 0.0;  // first-stage value of this step, EUR
};

struct StagePlan {
  std::vector<PlannedStep> steps;
  std::vector<double> soh;        // H_0..H_T as planned (interpolated flows)
  std::vector<double> soh_exact;  // H_0..H_T recomputed with exact g
  double objective = 0.0;
  double first_stage_income = 0.0;
  double max_linearization_gap = 0.0;  // max |interpolated - exact| flow, kW
};

/// Decode solver values into a plan. Throws IntegrityError when bounds, rows
/// or integrality are violated by more than `tol`.
StagePlan extract(const StageModel& stage, std::span<const double> values, double tol = 1e-6);

}  // namespace rfcmpc
