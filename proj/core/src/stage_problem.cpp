#include "rfcmpc/stage_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"

namespace rfcmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double curve_value(Curve curve, double p, const PlantParams& params) {
  return curve == Curve::El ? g_el(p, params) : g_f(p, params);
}

std::pair<double, double> curve_range(Curve curve, const PlantParams& params) {
  return curve == Curve::El ? std::pair{params.p_el_min, params.p_el_max}
                            : std::pair{params.p_f_min, params.p_f_max};
}

/// Location of the SOEC efficiency jump in kW, if it falls strictly inside
/// the operating range.
std::optional<double> el_jump(const PlantParams& params) {
  const double p = soec_threshold_w_per_cell(params.theta, params) * params.n_cells / 1000.0;
  if (p > params.p_el_min && p < params.p_el_max) return p;
  return std::nullopt;
}

double el_right_limit(double p, const PlantParams& params) {
  const double x = p / params.n_cells;
  const double eta = params.beta1 * params.theta * x - params.beta2 * x + params.beta3 * params.theta;
  return std::clamp(eta, 1e-6, 1.0) * p;
}

double clean(double v) { return std::abs(v) < 1e-9 ? 0.0 : v; }

}  // namespace

double BreakpointTable::interpolate(double p) const {
  if (power.empty()) throw std::logic_error("interpolate: empty table");
  for (std::size_t i = 0; i + 1 < power.size(); ++i) {
    const double a = power[i];
    const double b = power[i + 1];
    if (b <= a) continue;
    if (p >= a && p <= b) {
      const double w = (p - a) / (b - a);
      return phi[i] + w * (phi[i + 1] - phi[i]);
    }
  }
  if (p == power.front()) return phi.front();
  throw std::domain_error(fmt::format("interpolate: {} outside the table", p));
}

BreakpointTable breakpoint_table(Curve curve, std::size_t breakpoints, const PlantParams& params,
                                 BreakpointLayout layout) {
  if (breakpoints < 3) throw std::invalid_argument("breakpoint_table: need at least 3 breakpoints");
  const auto [lo, hi] = curve_range(curve, params);
  BreakpointTable t;
  t.power.push_back(0.0);
  t.phi.push_back(0.0);
  const std::size_t n = breakpoints - 1;
  for (std::size_t i = 0; i < n; ++i) {
    // Endpoints are set exactly so they reproduce the operating limits.
    const double p = i == 0 ? lo : (i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    t.power.push_back(p);
    t.phi.push_back(curve_value(curve, p, params));
  }
  if (layout == BreakpointLayout::SplitDiscontinuity && curve == Curve::El) {
    if (const auto jump = el_jump(params)) {
      const auto pos = std::lower_bound(t.power.begin(), t.power.end(), *jump) - t.power.begin();
      // A uniform point sitting exactly on the jump is replaced by the pair.
      const bool replace = t.power[static_cast<std::size_t>(pos)] == *jump;
      if (replace) {
        t.power.erase(t.power.begin() + pos);
        t.phi.erase(t.phi.begin() + pos);
      }
      t.power.insert(t.power.begin() + pos, {*jump, *jump});
      t.phi.insert(t.phi.begin() + pos, {g_el(*jump, params), el_right_limit(*jump, params)});
    }
  }
  return t;
}

double max_interpolation_error(const BreakpointTable& table, Curve curve,
                               const PlantParams& params, std::size_t samples) {
  const auto [lo, hi] = curve_range(curve, params);
  std::vector<double> probes;
  probes.reserve(samples + 2 * table.size());
  for (std::size_t i = 0; i < samples; ++i)
    probes.push_back(samples == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (samples - 1));
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    probes.push_back(table.power[i]);
    probes.push_back(0.5 * (table.power[i] + table.power[i + 1]));
  }
  probes.push_back(hi);
  double worst = 0.0;
  for (double p : probes) {
    if (p < lo || p > hi) continue;
    worst = std::max(worst, std::abs(table.interpolate(p) - curve_value(curve, p, params)));
  }
  return worst;
}

std::size_t StageModel::mode_binary(std::size_t k, Mode m) const {
  const StepColumns& s = steps.at(k);
  switch (m) {
    case Mode::Soec: return s.d_el;
    case Mode::Sofc: return s.d_f;
    case Mode::TSoec: return s.d_tel;
    case Mode::TSofc: return s.d_tf;
  }
  return s.d_el;
}

std::vector<int> StageModel::branch_priority() const {
  std::vector<int> prio(model.num_variables(), 0);
  for (const StepColumns& s : steps)
    for (std::size_t j : {s.d_el, s.d_f, s.d_tel, s.d_tf}) prio[j] = 1;
  return prio;
}

StageModel build(const StageData& data) {
  const PlantParams& pp = data.params;
  pp.validate();
  const std::size_t horizon = data.horizon();
  const std::size_t n_scen = data.scenarios.size();
  if (horizon < 1) throw BuildError("build: horizon must be >= 1");
  try {
    data.scenarios.validate(1e-9);
  } catch (const std::invalid_argument& e) {
    throw BuildError(fmt::format("build: {}", e.what()));
  }
  if (data.prices.size() < horizon)
    throw BuildError(fmt::format("build: {} prices for a horizon of {}", data.prices.size(), horizon));
  const double h0 = data.state.soh;
  if (!(h0 >= pp.h_min && h0 <= pp.h_max))
    throw BuildError(fmt::format("build: SoH {} outside [{}, {}]", h0, pp.h_min, pp.h_max));
  for (const BreakpointTable* t : {&data.el_table, &data.f_table}) {
    if (t->size() < 3 || t->power.front() != 0.0 || t->phi.front() != 0.0)
      throw BuildError("build: breakpoint tables must start at (0, 0) with >= 3 points");
    for (std::size_t i = 1; i < t->size(); ++i)
      if (t->power[i] < t->power[i - 1] || (i >= 2 && t->power[i] == t->power[i - 1] && t->power[i - 1] == t->power[i - 2]))
        throw BuildError("build: breakpoint powers must be nondecreasing, repeating at most once");
  }
  if (data.omega_plus < 0.0 || data.omega_minus < 0.0)
    throw BuildError("build: penalty weights must be >= 0");

  StageModel out;
  out.data = data;
  for (std::size_t k = 0; k < horizon; ++k)
    if (data.prices[k] < 0.0)
      out.warnings.push_back(fmt::format(
          "negative price {} at step {}: the self-consumption relaxation may be loose",
          data.prices[k], k));

  MilpModel& m = out.model;
  m.name = "RFCSTAGE";
  const double soh_gain = pp.delta_t / pp.e_h;
  const double income_ac = -pp.delta_t * (pp.c_m + pp.c_r);

  out.steps.resize(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    StepColumns& c = out.steps[k];
    c.p_e = m.add_continuous(0.0, pp.p_e_max);
    c.p_el = m.add_continuous(0.0, pp.p_el_max);
    c.p_f = m.add_continuous(0.0, pp.p_f_max);
    c.p_ac = m.add_continuous(0.0, pp.p_e_max);
    c.gamma = m.add_continuous(0.0, kInf);
    c.d_el = m.add_binary();
    c.d_f = m.add_binary();
    c.d_tel = m.add_binary();
    c.d_tf = m.add_binary();
    for (std::size_t l = 0; l < data.el_table.size(); ++l) c.lambda_el.push_back(m.add_continuous(0.0, 1.0));
    for (std::size_t l = 0; l < data.f_table.size(); ++l) c.lambda_f.push_back(m.add_continuous(0.0, 1.0));
    for (std::size_t l = 0; l + 1 < data.el_table.size(); ++l) c.segment_el.push_back(m.add_binary());
    for (std::size_t l = 0; l + 1 < data.f_table.size(); ++l) c.segment_f.push_back(m.add_binary());
    c.soh_next = m.add_continuous(pp.h_min, pp.h_max);
    for (std::size_t s = 0; s < n_scen; ++s) {
      c.xi_plus.push_back(m.add_continuous(0.0, kInf));
      c.xi_minus.push_back(m.add_continuous(0.0, kInf));
      c.chi_plus.push_back(m.add_continuous(0.0, kInf));
      c.chi_minus.push_back(m.add_continuous(0.0, kInf));
    }
    m.add_sos2(c.lambda_el);
    m.add_sos2(c.lambda_f);

    m.set_objective(c.p_ac, income_ac);
    m.set_objective(c.p_e, -pp.delta_t * data.prices[k]);
    for (std::size_t s = 0; s < n_scen; ++s) {
      const double pi = data.scenarios.probabilities[s];
      m.set_objective(c.xi_plus[s], pi * data.omega_plus);
      m.set_objective(c.chi_plus[s], pi * data.omega_plus);
      m.set_objective(c.xi_minus[s], pi * data.omega_minus);
      m.set_objective(c.chi_minus[s], pi * data.omega_minus);
    }
  }

  // Previously applied mode pins the admissible modes at k = 0.
  const StepColumns& first = out.steps.front();
  switch (data.state.mode) {
    case Mode::Soec:
      m.set_bounds(first.d_f, 0.0, 0.0);
      m.set_bounds(first.d_tel, 0.0, 0.0);
      break;
    case Mode::Sofc:
      m.set_bounds(first.d_el, 0.0, 0.0);
      m.set_bounds(first.d_tf, 0.0, 0.0);
      break;
    case Mode::TSoec: m.set_bounds(first.d_el, 1.0, 1.0); break;
    case Mode::TSofc: m.set_bounds(first.d_f, 1.0, 1.0); break;
  }

  const auto add_group = [&m](const std::vector<std::size_t>& lambda,
                              const std::vector<std::size_t>& segment, const BreakpointTable& t,
                              std::size_t power_col, std::size_t mode_col, double p_min,
                              double p_max) {
    std::vector<LinearTerm> def{{power_col, 1.0}};
    std::vector<LinearTerm> convex{{mode_col, -1.0}};
    std::vector<LinearTerm> pick{{mode_col, -1.0}};
    for (std::size_t l = 0; l < lambda.size(); ++l) {
      def.push_back({lambda[l], -t.power[l]});
      convex.push_back({lambda[l], 1.0});
    }
    for (std::size_t s : segment) pick.push_back({s, 1.0});
    m.add_constraint(std::move(def), Sense::Equal, 0.0);
    m.add_constraint(std::move(convex), Sense::Equal, 0.0);
    m.add_constraint({{power_col, 1.0}, {mode_col, -p_min}}, Sense::GreaterEqual, 0.0);
    m.add_constraint({{power_col, 1.0}, {mode_col, -p_max}}, Sense::LessEqual, 0.0);
    m.add_constraint(std::move(pick), Sense::Equal, 0.0);
    // lambda_l may be positive only next to the chosen segment.
    for (std::size_t l = 0; l < lambda.size(); ++l) {
      std::vector<LinearTerm> adj{{lambda[l], 1.0}};
      if (l > 0) adj.push_back({segment[l - 1], -1.0});
      if (l < segment.size()) adj.push_back({segment[l], -1.0});
      m.add_constraint(std::move(adj), Sense::LessEqual, 0.0);
    }
  };

  for (std::size_t k = 0; k < horizon; ++k) {
    const StepColumns& c = out.steps[k];
    m.add_constraint({{c.d_el, 1.0}, {c.d_f, 1.0}, {c.d_tel, 1.0}, {c.d_tf, 1.0}}, Sense::Equal, 1.0);
    add_group(c.lambda_el, c.segment_el, data.el_table, c.p_el, c.d_el, pp.p_el_min, pp.p_el_max);
    add_group(c.lambda_f, c.segment_f, data.f_table, c.p_f, c.d_f, pp.p_f_min, pp.p_f_max);

    // Tank: H_{k+1} - H_k - (dt/E)(phi_el - phi_f) = 0 with phi from the tables.
    std::vector<LinearTerm> tank{{c.soh_next, 1.0}};
    for (std::size_t l = 0; l < c.lambda_el.size(); ++l)
      tank.push_back({c.lambda_el[l], -soh_gain * data.el_table.phi[l]});
    for (std::size_t l = 0; l < c.lambda_f.size(); ++l)
      tank.push_back({c.lambda_f[l], soh_gain * data.f_table.phi[l]});
    double tank_rhs = 0.0;
    if (k == 0)
      tank_rhs = h0;
    else
      tank.push_back({out.steps[k - 1].soh_next, -1.0});
    m.add_constraint(std::move(tank), Sense::Equal, tank_rhs);

    m.add_constraint({{c.p_ac, 1.0}, {c.p_e, -1.0}}, Sense::LessEqual, 0.0);

    if (k > 0) {
      const StepColumns& p = out.steps[k - 1];
      m.add_constraint({{p.d_el, 1.0}, {c.d_f, 1.0}}, Sense::LessEqual, 1.0);
      m.add_constraint({{p.d_el, 1.0}, {c.d_tel, 1.0}}, Sense::LessEqual, 1.0);
      m.add_constraint({{p.d_f, 1.0}, {c.d_el, 1.0}}, Sense::LessEqual, 1.0);
      m.add_constraint({{p.d_f, 1.0}, {c.d_tf, 1.0}}, Sense::LessEqual, 1.0);
      m.add_constraint({{p.d_tel, 1.0}, {c.d_el, -1.0}}, Sense::LessEqual, 0.0);
      m.add_constraint({{p.d_tf, 1.0}, {c.d_f, -1.0}}, Sense::LessEqual, 0.0);
    }

    // Second stage: uncertain rows relaxed per scenario.
    for (std::size_t s = 0; s < n_scen; ++s) {
      const JointPath& sc = data.scenarios.scenarios[s];
      m.add_constraint({{c.p_ac, 1.0}, {c.gamma, 1.0}, {c.xi_plus[s], -1.0}, {c.xi_minus[s], 1.0}},
                       Sense::Equal, sc.load[k]);
      m.add_constraint({{c.p_el, 1.0},
                        {c.p_f, -1.0},
                        {c.d_tel, pp.p_tilde_el},
                        {c.d_tf, pp.p_tilde_f},
                        {c.p_e, 1.0},
                        {c.chi_plus[s], -1.0},
                        {c.chi_minus[s], 1.0}},
                       Sense::Equal, sc.res[k]);
    }
  }

  // Rolling switch limit over every window of switch_window steps lying
  // inside [t - (M - 1), t + T - 1]; earlier steps come from the history.
  const long window = pp.switch_window;
  const long t_len = static_cast<long>(horizon);
  const auto& hist = data.state.switch_history;
  const long h_len = static_cast<long>(hist.size());
  for (long start = -(window - 1); start <= t_len - window; ++start) {
    std::vector<LinearTerm> tel;
    std::vector<LinearTerm> tf;
    int used_tel = 0;
    int used_tf = 0;
    for (long j = start; j < start + window; ++j) {
      if (j >= 0) {
        tel.push_back({out.steps[static_cast<std::size_t>(j)].d_tel, 1.0});
        tf.push_back({out.steps[static_cast<std::size_t>(j)].d_tf, 1.0});
      } else if (-j <= h_len) {
        const Mode past = hist[static_cast<std::size_t>(h_len + j)];
        used_tel += past == Mode::TSoec;
        used_tf += past == Mode::TSofc;
      }
    }
    if (used_tel > pp.max_switches || used_tf > pp.max_switches)
      throw BuildError("build: switch history already exceeds the switch limit");
    m.add_constraint(std::move(tel), Sense::LessEqual, pp.max_switches - used_tel);
    m.add_constraint(std::move(tf), Sense::LessEqual, pp.max_switches - used_tf);
  }

  m.validate();
  return out;
}

StagePlan extract(const StageModel& stage, std::span<const double> values, double tol) {
  const MilpModel& m = stage.model;
  if (values.size() != m.num_variables())
    throw IntegrityError(fmt::format("extract: {} values for {} variables", values.size(),
                                     m.num_variables()));
  const auto v = m.violation(values);
  if (v.bound > tol || v.row > tol || v.integrality > tol)
    throw IntegrityError(fmt::format(
        "extract: solution violates the model (bound {:.3g}, row {:.3g}, integrality {:.3g})",
        v.bound, v.row, v.integrality));

  const StageData& d = stage.data;
  const PlantParams& pp = d.params;
  StagePlan plan;
  plan.objective = m.objective_value(values);
  plan.soh.push_back(d.state.soh);
  plan.soh_exact.push_back(d.state.soh);

  for (std::size_t k = 0; k < stage.steps.size(); ++k) {
    const StepColumns& c = stage.steps[k];
    PlannedStep st;
    int active = 0;
    for (Mode mode : kAllModes)
      if (std::round(values[stage.mode_binary(k, mode)]) == 1.0) {
        st.mode = mode;
        ++active;
      }
    if (active != 1)
      throw IntegrityError(fmt::format("extract: {} active modes at step {}", active, k));
    st.p_e = clean(values[c.p_e]);
    st.p_el = st.mode == Mode::Soec ? clean(values[c.p_el]) : 0.0;
    st.p_f = st.mode == Mode::Sofc ? clean(values[c.p_f]) : 0.0;
    if (st.mode == Mode::Soec)
      st.p_el = std::clamp(st.p_el, pp.p_el_min, pp.p_el_max);
    if (st.mode == Mode::Sofc)
      st.p_f = std::clamp(st.p_f, pp.p_f_min, pp.p_f_max);
    st.p_r = rfc_power(st.mode, st.p_el, st.p_f, pp);
    st.p_ac = clean(values[c.p_ac]);
    st.gamma = clean(values[c.gamma]);
    for (std::size_t l = 0; l < c.lambda_el.size(); ++l) st.phi_el += values[c.lambda_el[l]] * d.el_table.phi[l];
    for (std::size_t l = 0; l < c.lambda_f.size(); ++l) st.phi_f += values[c.lambda_f[l]] * d.f_table.phi[l];
    for (std::size_t s = 0; s < c.xi_plus.size(); ++s) {
      st.xi_plus.push_back(clean(values[c.xi_plus[s]]));
      st.xi_minus.push_back(clean(values[c.xi_minus[s]]));
      st.chi_plus.push_back(clean(values[c.chi_plus[s]]));
      st.chi_minus.push_back(clean(values[c.chi_minus[s]]));
    }
    st.income = income_step(st.p_ac, st.p_e, d.prices[k], pp);
    plan.first_stage_income += st.income;

    const double exact_el = g_el(st.p_el, pp);
    const double exact_f = g_f(st.p_f, pp);
    plan.max_linearization_gap = std::max(
        {plan.max_linearization_gap, std::abs(exact_el - st.phi_el), std::abs(exact_f - st.phi_f)});
    plan.soh.push_back(values[c.soh_next]);
    plan.soh_exact.push_back(soh_step(plan.soh_exact.back(), exact_el, exact_f, pp));
    plan.steps.push_back(std::move(st));
  }
  return plan;
}

}  // namespace rfcmpc
