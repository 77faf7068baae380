#include "rfcmpc/mpc_controller.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"

namespace rfcmpc {

namespace {

constexpr double kZero = 1e-12;

}  // namespace

StageData make_stage_data(const PlantState& state, const ScenarioSet& scenarios,
                          std::span<const double> prices, const PlantParams& params,
                          const ControllerSettings& settings) {
  StageData d;
  d.scenarios = scenarios;
  d.prices.assign(prices.begin(), prices.begin() + static_cast<std::ptrdiff_t>(
                                                       std::min(prices.size(), scenarios.horizon())));
  d.state = state;
  d.params = params;
  d.el_table = breakpoint_table(Curve::El, settings.breakpoints, params, BreakpointLayout::SplitDiscontinuity);
  d.f_table = breakpoint_table(Curve::F, settings.breakpoints, params);
  d.omega_plus = settings.omega_plus;
  d.omega_minus = settings.omega_minus;
  return d;
}

PlanOutcome plan_step(const PlantState& state, const ScenarioSet& scenarios,
                      std::span<const double> prices, const PlantParams& params,
                      const ControllerSettings& settings) {
  const StageModel stage = build(make_stage_data(state, scenarios, prices, params, settings));
  SolveOptions options = settings.solve;
  options.branch_priority = stage.branch_priority();
  Solution sol;
  std::size_t nodes = 0;
  if (settings.external) {
    sol = solve_external(stage.model, *settings.external);
  } else {
    // A node limit that ends before the first incumbent is raised tenfold, twice.
    for (int attempt = 0;; ++attempt) {
      sol = solve(stage.model, options);
      nodes += sol.nodes;
      if (sol.has_values() || sol.status != SolveStatus::Limit || attempt == 2 ||
          sol.nodes < options.node_limit)
        break;
      options.node_limit *= 10;
    }
    sol.nodes = nodes;
  }
  if (!sol.has_values() || sol.status == SolveStatus::Infeasible || sol.status == SolveStatus::Unbounded)
    throw SolverError(fmt::format("stage problem {} after {} nodes{}{}", to_string(sol.status), sol.nodes,
                                  sol.message.empty() ? "" : ": ", sol.message));
  PlanOutcome out;
  out.plan = extract(stage, sol.values);
  out.status = sol.status;
  out.nodes = sol.nodes;
  out.solve_seconds = sol.wall_seconds;
  out.warnings = stage.warnings;
  if (sol.status == SolveStatus::Limit) out.warnings.push_back("solver limit reached: " + sol.message);
  return out;
}

AppliedDecision compensate(const PlannedStep& planned, double actual_res, double actual_load,
                           const PlantState& state, const PlantParams& params) {
  if (!(actual_res >= 0.0) || !(actual_load >= 0.0) || !std::isfinite(actual_res) || !std::isfinite(actual_load))
    throw InputError(fmt::format("compensate: actual RES {} / load {} must be finite and >= 0",
                                 actual_res, actual_load));
  AppliedDecision a;
  a.mode = planned.mode;
  a.p_e = std::clamp(planned.p_e, 0.0, params.p_e_max);
  a.p_el = planned.mode == Mode::Soec ? planned.p_el : 0.0;
  a.p_f = planned.mode == Mode::Sofc ? planned.p_f : 0.0;

  // Tank headroom under the exact conversion curves.
  const double h = state.soh;
  double el_cap = params.p_el_max;
  double f_cap = params.p_f_max;
  if (a.mode == Mode::Soec) {
    const auto cap = largest_feasible(params.p_el_min, params.p_el_max, [&](double p) {
      return soh_step(h, g_el(p, params), 0.0, params) <= params.h_max;
    });
    if (!cap) {
      a.flagged = true;
      a.diagnostic = "tank full at minimum SOEC power";
    }
    el_cap = cap.value_or(params.p_el_min);
    a.p_el = std::min(a.p_el, el_cap);
  } else if (a.mode == Mode::Sofc) {
    const auto cap = largest_feasible(params.p_f_min, params.p_f_max, [&](double p) {
      return soh_step(h, 0.0, g_f(p, params), params) >= params.h_min;
    });
    if (!cap) {
      a.flagged = true;
      a.diagnostic = "tank empty at minimum SOFC power";
    }
    f_cap = cap.value_or(params.p_f_min);
    a.p_f = std::min(a.p_f, f_cap);
  }

  a.p_r = rfc_power(a.mode, a.p_el, a.p_f, params);
  double mismatch = actual_res - (a.p_r + a.p_e);
  if (std::abs(mismatch) <= kZero) mismatch = 0.0;

  if (mismatch > 0.0) {
    double surplus = mismatch;
    const double up = std::min(surplus, params.p_e_max - a.p_e);
    a.p_e += up;
    surplus -= up;
    if (surplus > 0.0 && a.mode == Mode::Soec) {
      const double room = std::max(0.0, el_cap - a.p_el);
      const double more = std::min(surplus, room);
      a.p_el = more == room ? std::max(a.p_el, el_cap) : a.p_el + more;
      surplus -= more;
    }
    a.curtailed = surplus;
  } else if (mismatch < 0.0) {
    double need = -mismatch;
    if (a.mode == Mode::Soec) {
      const double room = std::max(0.0, a.p_el - params.p_el_min);
      const double down = std::min(need, room);
      a.p_el = down == room ? params.p_el_min : a.p_el - down;
      need -= down;
    } else if (a.mode == Mode::Sofc) {
      const double room = std::max(0.0, f_cap - a.p_f);
      const double up = std::min(need, room);
      a.p_f = up == room ? std::max(a.p_f, f_cap) : a.p_f + up;
      need -= up;
    }
    const double down = std::min(need, a.p_e);
    a.p_e -= down;
    need -= down;
    if (need > 1e-9) {
      a.flagged = true;
      if (!a.diagnostic.empty()) a.diagnostic += "; ";
      a.diagnostic += fmt::format("deficit of {:.6g} kW left after compensation", need);
    }
  }

  a.p_r = rfc_power(a.mode, a.p_el, a.p_f, params);
  // Close the balance on export so that it holds to rounding.
  if (!a.flagged && a.curtailed == 0.0) {
    const double e = actual_res - a.p_r;
    if (e >= 0.0 && e <= params.p_e_max && std::abs(e - a.p_e) <= 1e-9) a.p_e = e;
  }
  a.residual = actual_res - a.curtailed - (a.p_r + a.p_e);
  if (std::abs(a.residual) <= 1e-9 && !a.flagged) a.residual = 0.0;

  a.p_ac = std::min(a.p_e, actual_load);
  a.gamma = actual_load - a.p_ac;
  a.phi_el = g_el(a.p_el, params);
  a.phi_f = g_f(a.p_f, params);
  a.soh_after = soh_step(h, a.phi_el, a.phi_f, params);
  // Rounding-level overshoot from a plan that sits exactly on a tank bound.
  if (a.soh_after > params.h_max && a.soh_after - params.h_max <= 1e-9) a.soh_after = params.h_max;
  if (a.soh_after < params.h_min && params.h_min - a.soh_after <= 1e-9) a.soh_after = params.h_min;
  return a;
}

}  // namespace rfcmpc
