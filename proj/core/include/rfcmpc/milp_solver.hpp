#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rfcmpc/milp_model.hpp"

namespace rfcmpc {

enum class SolveStatus { Optimal, Infeasible, Unbounded, Limit };

std::string to_string(SolveStatus s);

struct SolveOptions {
  std::size_t node_limit = 1'000'000;
  double time_limit_s = std::numeric_limits<double>::infinity();
  double gap_abs = 1e-6;
  double integrality_tol = 1e-6;
  /// Branch on violated SOS2 groups before binaries.
  bool sos2_branching = false;
  /// Per-variable branching priority; fractional binaries of the highest
  /// priority are branched on first. Empty means all equal.
  std::vector<int> branch_priority;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> values;  // empty when no feasible point is known
  std::size_t nodes = 0;
  double wall_seconds = 0.0;
  double dual_bound = -std::numeric_limits<double>::infinity();
  std::size_t lp_iterations = 0;
  std::string message;

  bool has_values() const { return !values.empty(); }
};

/// LP relaxation (integrality and SOS2 dropped) by the bounded revised simplex.
Solution solve_lp(const MilpModel& model, const SolveOptions& options = {});

/// Deterministic branch-and-bound on the binaries. After branching the solver
/// dives into the child on the rounding side; otherwise it resumes from the
/// open node with the lowest bound (ties: deeper, then newer). Branching picks
/// the binary with the best pseudocost product among those of top priority.
Solution solve(const MilpModel& model, const SolveOptions& options = {});

}  // namespace rfcmpc
