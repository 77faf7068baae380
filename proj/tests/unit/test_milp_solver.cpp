#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rfcmpc/milp_solver.hpp"
#include "rfcmpc/stage_problem.hpp"

using namespace rfcmpc;

TEST_CASE("elementary LPs") {
  MilpModel m;
  const auto x = m.add_continuous(-INFINITY, INFINITY);
  m.set_objective(x, 1.0);
  m.add_constraint({{x, 1.0}}, Sense::GreaterEqual, 3.0);
  const Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.values[x] == 3.0);
  CHECK(s.objective == 3.0);

  MilpModel inf;
  const auto y = inf.add_continuous(-INFINITY, INFINITY);
  inf.add_constraint({{y, 1.0}}, Sense::LessEqual, 0.0);
  inf.add_constraint({{y, 1.0}}, Sense::GreaterEqual, 1.0);
  CHECK(solve_lp(inf).status == SolveStatus::Infeasible);
  CHECK(solve(inf).status == SolveStatus::Infeasible);

  MilpModel unb;
  const auto z = unb.add_continuous(0.0, INFINITY);
  unb.set_objective(z, -1.0);
  CHECK(solve_lp(unb).status == SolveStatus::Unbounded);
  CHECK(solve(unb).status == SolveStatus::Unbounded);
}

TEST_CASE("three-variable LP matches vertex enumeration") {
  // min -3a - 2b - 4c  s.t.  a + b + 2c <= 4, 2a + c <= 5, b + c >= 1, a,b,c in [0, 3]
  MilpModel m;
  for (int i = 0; i < 3; ++i) m.add_continuous(0.0, 3.0);
  m.set_objective(0, -3.0);
  m.set_objective(1, -2.0);
  m.set_objective(2, -4.0);
  m.add_constraint({{0, 1.0}, {1, 1.0}, {2, 2.0}}, Sense::LessEqual, 4.0);
  m.add_constraint({{0, 2.0}, {2, 1.0}}, Sense::LessEqual, 5.0);
  m.add_constraint({{1, 1.0}, {2, 1.0}}, Sense::GreaterEqual, 1.0);
  oracle::SmallLp lp{{{1, 1, 2}, {2, 0, 1}, {0, 1, 1}},
                     {Sense::LessEqual, Sense::LessEqual, Sense::GreaterEqual},
                     {4, 5, 1},
                     {0, 0, 0},
                     {3, 3, 3},
                     {-3, -2, -4}};
  const auto ref = oracle::vertex_min(lp);
  REQUIRE(ref.has_value());
  const Solution s = solve_lp(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == doctest::Approx(*ref).epsilon(1e-12));
  CHECK(s.dual_bound == doctest::Approx(s.objective).epsilon(1e-9));
}

TEST_CASE("knapsack") {
  MilpModel m;
  const auto a = m.add_binary();
  const auto b = m.add_binary();
  m.set_objective(a, -5.0);
  m.set_objective(b, -4.0);
  m.add_constraint({{a, 1.0}, {b, 1.0}}, Sense::LessEqual, 1.0);
  const Solution s = solve(m);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective == -5.0);
  CHECK(s.values[a] == 1.0);
  CHECK(s.values[b] == 0.0);
}

TEST_CASE("pure LP through branch-and-bound equals the LP solve") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    MilpModel m = oracle::random_milp(rng, 0);
    const Solution a = solve_lp(m);
    const Solution b = solve(m);
    CHECK(a.status == b.status);
    if (a.status == SolveStatus::Optimal) CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-12));
  }
}

TEST_CASE("random MILPs match enumeration") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 60; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 10);
    const MilpModel m = oracle::random_milp(rng, n);
    const auto ref = oracle::enumerate_milp(m);
    const Solution s = solve(m);
    if (!ref) {
      CHECK(s.status == SolveStatus::Infeasible);
      continue;
    }
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(std::abs(s.objective - *ref) <= 1e-6);
    const auto v = m.violation(s.values);
    CHECK(v.integrality <= 1e-6);
    CHECK(v.row_scaled <= 1e-7);
    CHECK(v.bound <= 1e-9);
  }
}

TEST_CASE("determinism and limits") {
  std::mt19937_64 rng(8);
  const StageData d = oracle::random_stage(rng, 6, 2, 5);
  const StageModel st = build(d);
  SolveOptions opt;
  opt.branch_priority = st.branch_priority();
  const Solution a = solve(st.model, opt);
  const Solution b = solve(st.model, opt);
  CHECK(a.status == b.status);
  CHECK(a.nodes == b.nodes);
  CHECK(a.values == b.values);
  CHECK(a.lp_iterations == b.lp_iterations);

  opt.node_limit = 1;
  const Solution c = solve(st.model, opt);
  CHECK(c.status == SolveStatus::Limit);
  CHECK(c.nodes == 1);

  opt.branch_priority.resize(3);
  CHECK_THROWS(solve(st.model, opt));
}

TEST_CASE("SOS2 branching reaches the same optimum") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 6; ++i) {
    const StageData d = oracle::random_stage(rng, 3, 2, 6);
    StageModel st;
    try {
      st = build(d);
    } catch (const std::exception&) {
      continue;
    }
    SolveOptions plain;
    SolveOptions sos;
    sos.sos2_branching = true;
    const Solution a = solve(st.model, plain);
    const Solution b = solve(st.model, sos);
    REQUIRE(a.status == b.status);
    if (a.status == SolveStatus::Optimal) CHECK(std::abs(a.objective - b.objective) <= 1e-6);
  }
}

TEST_CASE("two-step stage problems match the mode-sequence oracle") {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 25; ++i) {
    const StageData d = oracle::random_stage(rng, 2, 2, 3);
    const auto ref = oracle::enumerate_modes(d);
    const StageModel st = build(d);
    const Solution s = solve(st.model);
    if (!ref.objective) {
      CHECK(s.status == SolveStatus::Infeasible);
      continue;
    }
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(std::abs(s.objective - *ref.objective) <= 1e-6);
  }
}
