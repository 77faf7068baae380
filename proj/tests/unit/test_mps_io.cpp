#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "rfcmpc/errors.hpp"
#include "rfcmpc/external_solver.hpp"
#include "rfcmpc/milp_solver.hpp"
#include "rfcmpc/mps_io.hpp"
#include "rfcmpc/stage_problem.hpp"

using namespace rfcmpc;

namespace {

MilpModel round_trip(const MilpModel& m) {
  std::istringstream in(to_mps(m));
  return read_mps(in);
}

bool have_scipy() { return std::system("python3 -c 'import scipy.optimize' >/dev/null 2>&1") == 0; }

}  // namespace

TEST_CASE("MPS round-trips bit-exactly") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 30; ++i) {
    MilpModel m = oracle::random_milp(rng, 1 + i % 8);
    m.set_objective(0, 0.1 + 1e-17 * i);  // not representable in short decimal
    const std::string text = to_mps(m);
    const MilpModel back = round_trip(m);
    CHECK(back == m);
    CHECK(to_mps(back) == text);
  }
  const StageModel st = build(oracle::random_stage(rng, 4, 2, 8));
  CHECK(round_trip(st.model) == st.model);
  CHECK(to_mps(round_trip(st.model)) == to_mps(st.model));
}

TEST_CASE("MPS bound kinds") {
  MilpModel m;
  m.add_continuous(-INFINITY, INFINITY);
  m.add_continuous(-INFINITY, 3.0);
  m.add_continuous(2.0, INFINITY);
  m.add_continuous(1.5, 1.5);
  m.add_continuous(-2.0, 7.25);
  m.add_binary();
  const auto g1 = m.add_continuous(0.0, 1.0);
  const auto g2 = m.add_continuous(0.0, 1.0);
  m.add_sos2({g1, g2});
  m.add_constraint({{0, 1.0}, {5, -2.5}}, Sense::Equal, -1.0);
  m.add_constraint({{1, 1.0}, {2, 1.0}}, Sense::GreaterEqual, 0.0);
  CHECK(round_trip(m) == m);
}

TEST_CASE("malformed MPS is rejected") {
  for (const char* text : {"NAME X\nROWS\n N OBJ\n L c0\nCOLUMNS\n    x0  c9  1\nENDATA\n",
                           "NAME X\nROWS\n Q OBJ\nENDATA\n",
                           "NAME X\nROWS\n N OBJ\nCOLUMNS\n    x0  OBJ  abc\nENDATA\n",
                           "garbage\n"}) {
    std::istringstream in(text);
    CHECK_THROWS_AS(read_mps(in), InputError);
  }
}

TEST_CASE("solution files") {
  const std::vector<double> v{0.1, -2.0, 1e-300, 3.0};
  std::ostringstream out;
  write_solution(v, out);
  std::istringstream in(out.str());
  const SolutionFile back = read_solution(in, 4);
  CHECK(back.status == "optimal");
  CHECK(back.values == v);

  std::istringstream with_status("status limit\nx1 2\nx0 1\n");
  const SolutionFile s = read_solution(with_status, 2);
  CHECK(s.status == "limit");
  CHECK(s.values == std::vector<double>{1.0, 2.0});

  for (const char* text : {"x0 1\nx0 2\n", "x0 1\ny1 2\n", "x0 1\nx1 nan?\n", "x0 1\n", "x0 1\nx5 1\n"}) {
    std::istringstream bad(text);
    CHECK_THROWS_AS(read_solution(bad, 2), InputError);
  }
  std::istringstream infeasible("status infeasible\n");
  CHECK(read_solution(infeasible, 2).values.empty());
}

TEST_CASE("external bridge failures") {
  MilpModel m;
  const auto x = m.add_binary();
  m.set_objective(x, -1.0);
  ExternalSolverProfile p;
  p.command = "/nonexistent/solver {mps} {sol}";
  CHECK_THROWS_AS(solve_external(m, p), BridgeError);
  p.command = ": {mps}; printf 'x0 abc\\n' > {sol}";
  CHECK_THROWS_AS(solve_external(m, p), BridgeError);
  p.command = ": {mps}; printf 'x0 0.5\\n' > {sol}";  // fractional binary
  CHECK_THROWS_AS(solve_external(m, p), BridgeError);
  p.command = ": {mps}; printf 'x0 1\\n' > {sol}";
  const Solution s = solve_external(m, p);
  CHECK(s.status == SolveStatus::Optimal);
  CHECK(s.objective == -1.0);
}

TEST_CASE("external solver agrees with the reference solver") {
  if (!have_scipy()) {
    MESSAGE("python3 with scipy not available; skipped");
    return;
  }
  const auto script = fixtures::source_dir() / "tools" / "external" / "scipy_milp.py";
  ExternalSolverProfile p;
  p.command = "python3 '" + script.string() + "' {mps} {sol}";
  std::mt19937_64 rng(61);
  for (int i = 0; i < 4; ++i) {
    const StageModel st = build(oracle::random_stage(rng, 3, 2, 4));
    const Solution ref = solve(st.model);
    if (ref.status != SolveStatus::Optimal) continue;
    const Solution ext = solve_external(st.model, p);
    REQUIRE(ext.status == SolveStatus::Optimal);
    CHECK(std::abs(ext.objective - ref.objective) <= 1e-6);
  }
}
