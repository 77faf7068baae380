#include <doctest.h>

#include <cmath>
#include <random>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/mpc_controller.hpp"

using namespace rfcmpc;

namespace {

ScenarioSet flat(std::size_t T, double load, double res) {
  ScenarioSet s;
  s.scenarios = {JointPath{std::vector<double>(T, load), std::vector<double>(T, res)}};
  s.probabilities = {1.0};
  return s;
}

PlannedStep soec(double p_el, double p_e) {
  PlannedStep p;
  p.mode = Mode::Soec;
  p.p_el = p_el;
  p.p_e = p_e;
  p.p_r = p_el;
  return p;
}

double balance(const AppliedDecision& a, double res) { return res - a.curtailed - (a.p_r + a.p_e); }

}  // namespace

TEST_CASE("perfect flat forecast is planned without recourse") {
  const PlantParams params;
  PlantState state;
  state.soh = 0.5;
  const std::vector<double> prices(8, 0.06);
  const PlanOutcome out = plan_step(state, flat(8, 60.0, 140.0), prices, params);
  CHECK(out.status == SolveStatus::Optimal);
  for (const auto& s : out.plan.steps) {
    CHECK(s.xi_plus[0] + s.xi_minus[0] <= 1e-9);
    CHECK(s.chi_plus[0] + s.chi_minus[0] <= 1e-9);
    CHECK(s.p_r + s.p_e == doctest::Approx(140.0).epsilon(1e-9));
  }
  const PlanOutcome again = plan_step(state, flat(8, 60.0, 140.0), prices, params);
  CHECK(again.plan.objective == out.plan.objective);
  CHECK(again.nodes == out.nodes);
  CHECK(again.plan.soh == out.plan.soh);
}

TEST_CASE("no RES and an empty tank force balance recourse") {
  const PlantParams params;
  PlantState state;
  state.soh = 0.0;
  state.mode = Mode::Soec;
  const std::vector<double> prices(4, 0.05);
  const PlanOutcome out = plan_step(state, flat(4, 150.0, 0.0), prices, params);
  const PlannedStep& k0 = out.plan.steps.front();
  CHECK(k0.p_e == 0.0);
  CHECK(k0.gamma == doctest::Approx(150.0));
  CHECK(k0.chi_plus[0] == doctest::Approx(rfc_power(k0.mode, k0.p_el, k0.p_f, params)).epsilon(1e-9));
  CHECK(k0.chi_plus[0] > 0.0);

  state.mode = Mode::TSofc;  // SOFC is forced next, with nothing in the tank
  CHECK_THROWS_AS(plan_step(state, flat(4, 150.0, 0.0), prices, params), SolverError);
}

TEST_CASE("compensation rules") {
  const PlantParams p;
  PlantState st;
  st.soh = 0.5;

  SUBCASE("exact forecast passes through") {
    const AppliedDecision a = compensate(soec(50.0, 70.0), 120.0, 60.0, st, p);
    CHECK(a.p_el == 50.0);
    CHECK(a.p_e == 70.0);
    CHECK(a.p_ac == 60.0);
    CHECK(a.gamma == 0.0);
    CHECK(a.residual == 0.0);
    CHECK_FALSE(a.flagged);
    CHECK(a.soh_after == soh_step(0.5, g_el(50.0, p), 0.0, p));
  }
  SUBCASE("surplus goes to export") {
    const AppliedDecision a = compensate(soec(20.0, 50.0), 80.0, 100.0, st, p);
    CHECK(a.p_e == 60.0);
    CHECK(a.p_el == 20.0);
    CHECK(a.p_ac == 60.0);
    CHECK(a.gamma == 40.0);
  }
  SUBCASE("surplus beyond the export limit goes to SOEC, then is curtailed") {
    const AppliedDecision a = compensate(soec(100.0, 300.0), 500.0, 10.0, st, p);
    CHECK(a.p_e == 340.0);
    CHECK(a.p_el == 160.0);
    CHECK(a.curtailed == doctest::Approx(0.0));
    const AppliedDecision b = compensate(soec(100.0, 300.0), 600.0, 10.0, st, p);
    CHECK(b.curtailed == doctest::Approx(100.0));
    CHECK(balance(b, 600.0) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("deficit lowers SOEC to its minimum, then export") {
    const AppliedDecision a = compensate(soec(10.0, 50.0), 55.0, 30.0, st, p);
    CHECK(a.p_el == doctest::Approx(7.2).epsilon(1e-12));
    CHECK(a.p_e == doctest::Approx(47.8).epsilon(1e-12));
    CHECK(a.residual == 0.0);
  }
  SUBCASE("deficit raises SOFC output within the tank") {
    PlannedStep f;
    f.mode = Mode::Sofc;
    f.p_f = 10.0;
    f.p_r = -10.0;
    f.p_e = 30.0;
    const AppliedDecision a = compensate(f, 15.0, 0.0, st, p);
    CHECK(a.p_f == doctest::Approx(15.0));
    CHECK(a.p_e == doctest::Approx(30.0));
    PlantState low;
    low.soh = 0.01;
    const AppliedDecision b = compensate(f, 15.0, 0.0, low, p);
    CHECK(b.soh_after >= 0.0);
    CHECK(b.p_f < 15.0);
    CHECK(b.p_e < 30.0);
  }
  SUBCASE("transition modes move export only") {
    PlannedStep t;
    t.mode = Mode::TSoec;
    t.p_r = 2.6;
    t.p_e = 20.0;
    const AppliedDecision a = compensate(t, 12.6, 5.0, st, p);
    CHECK(a.p_r == 2.6);
    CHECK(a.p_e == doctest::Approx(10.0));
  }
  SUBCASE("SOEC power is capped by a nearly full tank") {
    PlantState full;
    full.soh = 0.99;
    const AppliedDecision a = compensate(soec(150.0, 0.0), 150.0, 0.0, full, p);
    CHECK(a.soh_after <= 1.0);
    CHECK(a.p_el < 150.0);
    CHECK(a.p_e == doctest::Approx(150.0 - a.p_el));
  }
  SUBCASE("an impossible balance is flagged") {
    const AppliedDecision a = compensate(soec(7.2, 0.0), 0.0, 20.0, st, p);
    CHECK(a.flagged);
    CHECK(a.residual == doctest::Approx(-7.2));
    CHECK_FALSE(a.diagnostic.empty());
  }
  CHECK_THROWS_AS(compensate(soec(10.0, 0.0), -1.0, 0.0, st, p), InputError);
}

TEST_CASE("compensation invariants on random deviations") {
  const PlantParams p;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    PlantState st;
    st.soh = u(rng) < 0.1 ? 0.0 : (u(rng) < 0.1 ? 1.0 : u(rng));
    PlannedStep plan;
    plan.mode = kAllModes[i % 4];
    if (plan.mode == Mode::Soec) plan.p_el = p.p_el_min + u(rng) * (p.p_el_max - p.p_el_min);
    if (plan.mode == Mode::Sofc) plan.p_f = p.p_f_min + u(rng) * (p.p_f_max - p.p_f_min);
    plan.p_r = rfc_power(plan.mode, plan.p_el, plan.p_f, p);
    plan.p_e = u(rng) * 200.0;
    // Plans come from a model that keeps minimum-power operation inside the tank.
    if (plan.mode == Mode::Soec && soh_step(st.soh, g_el(p.p_el_min, p), 0.0, p) > p.h_max) continue;
    if (plan.mode == Mode::Sofc && soh_step(st.soh, 0.0, g_f(p.p_f_min, p), p) < p.h_min) continue;
    const double res = u(rng) * 400.0;
    const double load = u(rng) * 200.0;
    const AppliedDecision a = compensate(plan, res, load, st, p);
    CHECK(a.mode == plan.mode);
    CHECK(a.p_e >= 0.0);
    CHECK(a.p_e <= p.p_e_max);
    CHECK(a.p_ac == std::min(a.p_e, load));
    CHECK(a.soh_after >= p.h_min);
    CHECK(a.soh_after <= p.h_max);
    CHECK(a.curtailed >= 0.0);
    if (!a.flagged) CHECK(std::abs(balance(a, res)) <= 1e-9);
    if (a.mode == Mode::Soec) CHECK(a.p_el >= p.p_el_min);
    if (a.mode == Mode::Sofc) CHECK(a.p_f >= p.p_f_min);
  }
}

TEST_CASE("largest feasible power") {
  CHECK(largest_feasible(0.0, 10.0, [](double x) { return x <= 3.0; }).value() == doctest::Approx(3.0));
  CHECK(largest_feasible(0.0, 10.0, [](double) { return true; }) == 10.0);
  CHECK_FALSE(largest_feasible(1.0, 10.0, [](double x) { return x < 0.5; }).has_value());
}
