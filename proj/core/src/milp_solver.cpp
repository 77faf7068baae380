#include "rfcmpc/milp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include <fmt/core.h>

#include "lp_engine.hpp"

namespace rfcmpc {

namespace {

using detail::LpEngine;
using detail::LpStatus;
using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundChange {
  std::size_t var;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;
  double bound;
  std::size_t depth;
  std::size_t seq;
  // Branching record used to learn pseudocosts once this node is solved.
  std::size_t branch_var;
  bool branch_up;
  double branch_dist;
};

constexpr std::size_t kNoVar = std::numeric_limits<std::size_t>::max();

/// Per-variable average objective gain per unit of rounding distance.
class Pseudocosts {
 public:
  explicit Pseudocosts(std::size_t n) : sum_(2 * n, 0.0), count_(2 * n, 0) {}

  void record(std::size_t j, bool up, double dist, double gain) {
    if (dist <= 0.0) return;
    const std::size_t k = 2 * j + (up ? 1 : 0);
    sum_[k] += std::max(0.0, gain) / dist;
    ++count_[k];
    total_[up] += std::max(0.0, gain) / dist;
    ++seen_[up];
  }

  double estimate(std::size_t j, bool up) const {
    const std::size_t k = 2 * j + (up ? 1 : 0);
    if (count_[k] > 0) return sum_[k] / static_cast<double>(count_[k]);
    return seen_[up] > 0 ? total_[up] / static_cast<double>(seen_[up]) : 1.0;
  }

 private:
  std::vector<double> sum_;
  std::vector<std::size_t> count_;
  double total_[2] = {0.0, 0.0};
  std::size_t seen_[2] = {0, 0};
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Objective must not undercut the Lagrangian bound of the same basis.
bool duality_consistent(const LpEngine& lp) {
  const double obj = lp.objective();
  return obj >= lp.dual_bound() - 1e-7 * (1.0 + std::abs(obj));
}

struct Branch {
  std::vector<BoundChange> first;   // explored first
  std::vector<BoundChange> second;
  std::size_t var = kNoVar;  // binary branched on, if any
  double frac = 0.0;
  bool first_up = false;
};

std::optional<Branch> sos2_branch(const MilpModel& model, const std::vector<double>& x, double tol) {
  for (const auto& group : model.sos2_groups()) {
    std::size_t first = group.size();
    std::size_t last = 0;
    double total = 0.0;
    double best_pair = 0.0;
    for (std::size_t l = 0; l < group.size(); ++l) {
      const double v = std::abs(x[group[l]]);
      total += v;
      if (v > tol) {
        first = std::min(first, l);
        last = l;
      }
      best_pair = std::max(best_pair, v + (l + 1 < group.size() ? std::abs(x[group[l + 1]]) : 0.0));
    }
    if (total - best_pair <= tol || first == group.size() || last < first + 2) continue;
    const std::size_t r = first + (last - first) / 2 - 1;  // in [first, last - 2]
    Branch b;
    for (std::size_t l = r + 2; l < group.size(); ++l) b.first.push_back({group[l], 0.0, 0.0});
    for (std::size_t l = 0; l <= r; ++l) b.second.push_back({group[l], 0.0, 0.0});
    return b;
  }
  return std::nullopt;
}

std::optional<Branch> binary_branch(const MilpModel& model, const std::vector<double>& x, double tol,
                                    const Pseudocosts& pc, const std::vector<int>& priority) {
  constexpr double kEps = 1e-6;
  std::size_t pick = model.num_variables();
  double best = -1.0;
  int best_priority = std::numeric_limits<int>::min();
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].kind != VarKind::Binary) continue;
    const double f = x[j] - std::floor(x[j]);
    if (std::min(f, 1.0 - f) <= tol) continue;
    const int prio = priority.empty() ? 0 : priority[j];
    if (prio < best_priority) continue;
    if (prio > best_priority) {
      best_priority = prio;
      best = -1.0;
    }
    const double score =
        std::max(kEps, f * pc.estimate(j, false)) * std::max(kEps, (1.0 - f) * pc.estimate(j, true));
    if (score > best) {
      best = score;
      pick = j;
    }
  }
  if (pick == model.num_variables()) return std::nullopt;
  const double v = x[pick];
  const double down = std::floor(v);
  const double up = std::ceil(v);
  const Variable& var = model.variables()[pick];
  Branch b;
  b.var = pick;
  b.frac = v - down;
  BoundChange lo_child{pick, var.lower, down};
  BoundChange hi_child{pick, up, var.upper};
  b.first_up = v - down >= 0.5;
  b.first = {b.first_up ? hi_child : lo_child};
  b.second = {b.first_up ? lo_child : hi_child};
  return b;
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
  }
  return "?";
}

Solution solve_lp(const MilpModel& model, const SolveOptions&) {
  const auto start = Clock::now();
  model.validate();
  LpEngine lp(model);
  const LpStatus st = lp.solve();
  Solution sol;
  sol.nodes = 1;
  sol.lp_iterations = lp.iterations();
  switch (st) {
    case LpStatus::Optimal:
      sol.status = SolveStatus::Optimal;
      sol.values = lp.values();
      sol.objective = model.objective_value(sol.values);
      sol.dual_bound = lp.dual_bound();
      if (!duality_consistent(lp)) {
        sol.status = SolveStatus::Limit;
        sol.message = "weak duality audit failed";
      }
      break;
    case LpStatus::Infeasible: sol.status = SolveStatus::Infeasible; break;
    case LpStatus::Unbounded:
      sol.status = SolveStatus::Unbounded;
      sol.objective = -kInf;
      break;
    default:
      sol.status = SolveStatus::Limit;
      sol.message = fmt::format("LP solver stopped: {}", detail::to_string(st));
  }
  sol.wall_seconds = seconds_since(start);
  return sol;
}

Solution solve(const MilpModel& model, const SolveOptions& options) {
  const auto start = Clock::now();
  model.validate();
  if (!options.branch_priority.empty() && options.branch_priority.size() != model.num_variables())
    throw std::invalid_argument("solve: branch_priority must have one entry per variable");
  LpEngine lp(model);
  const std::size_t n = model.num_variables();

  Solution sol;
  Pseudocosts pseudo(n);
  std::vector<Node> open;
  std::optional<Node> next = Node{{}, -kInf, 0, 0, kNoVar, false, 0.0};
  std::size_t next_seq = 1;
  std::vector<std::size_t> touched;  // variables whose bounds differ from the root
  bool exhausted = true;
  bool numerical_trouble = false;
  double incumbent = kInf;
  std::vector<double> best;

  // Deepest first until an incumbent exists, best bound afterwards; ties
  // go deeper, then to the newest node.
  auto pop_next = [&]() {
    const bool dive = !std::isfinite(incumbent);
    auto it = std::min_element(open.begin(), open.end(), [dive](const Node& x, const Node& y) {
      if (dive && x.depth != y.depth) return x.depth > y.depth;
      if (x.bound != y.bound) return x.bound < y.bound;
      if (x.depth != y.depth) return x.depth > y.depth;
      return x.seq > y.seq;
    });
    Node nd = std::move(*it);
    open.erase(it);
    return nd;
  };

  while (next || !open.empty()) {
    if (sol.nodes >= options.node_limit || seconds_since(start) > options.time_limit_s) {
      exhausted = false;
      if (next) open.push_back(std::move(*next));
      break;
    }
    Node node = next ? std::move(*next) : pop_next();
    next.reset();
    if (node.bound >= incumbent - options.gap_abs) continue;

    for (std::size_t j : touched)
      lp.set_bounds(j, model.variables()[j].lower, model.variables()[j].upper);
    touched.clear();
    for (const BoundChange& c : node.changes) {
      lp.set_bounds(c.var, std::max(lp.lower(c.var), c.lower), std::min(lp.upper(c.var), c.upper));
      touched.push_back(c.var);
    }
    ++sol.nodes;

    bool crossed = false;
    for (const BoundChange& c : node.changes) crossed = crossed || lp.lower(c.var) > lp.upper(c.var);
    if (crossed) continue;

    const LpStatus st = lp.solve();
    if (st == LpStatus::Infeasible) continue;
    if (st == LpStatus::Unbounded) {
      if (node.depth == 0) {
        sol.status = SolveStatus::Unbounded;
        sol.objective = -kInf;
        sol.lp_iterations = lp.iterations();
        sol.wall_seconds = seconds_since(start);
        return sol;
      }
      numerical_trouble = true;
      continue;
    }
    if (st != LpStatus::Optimal || !duality_consistent(lp)) {
      numerical_trouble = true;
      lp.reset_basis();
      continue;
    }
    const double obj = lp.objective();
    if (node.branch_var != kNoVar && std::isfinite(node.bound))
      pseudo.record(node.branch_var, node.branch_up, node.branch_dist, obj - node.bound);
    if (obj >= incumbent - options.gap_abs) continue;
    const std::vector<double> x = lp.values();

    std::optional<Branch> branch;
    if (options.sos2_branching) branch = sos2_branch(model, x, options.integrality_tol);
    if (!branch) branch = binary_branch(model, x, options.integrality_tol, pseudo, options.branch_priority);
    if (!branch) {
      incumbent = obj;
      best = x;
      continue;
    }
    auto child = [&](const std::vector<BoundChange>& extra, bool up) {
      Node c{node.changes, obj, node.depth + 1, next_seq++, branch->var, up,
             up ? 1.0 - branch->frac : branch->frac};
      c.changes.insert(c.changes.end(), extra.begin(), extra.end());
      return c;
    };
    open.push_back(child(branch->second, !branch->first_up));
    next = child(branch->first, branch->first_up);
  }

  double open_bound = kInf;
  for (const Node& nd : open) open_bound = std::min(open_bound, nd.bound);
  sol.dual_bound = std::min(open_bound, incumbent);

  if (std::isfinite(incumbent)) {
    // Polish: fix the binaries and re-solve the continuous part.
    for (std::size_t j : touched)
      lp.set_bounds(j, model.variables()[j].lower, model.variables()[j].upper);
    for (std::size_t j = 0; j < n; ++j) {
      if (model.variables()[j].kind != VarKind::Binary) continue;
      best[j] = std::round(best[j]);
      lp.set_bounds(j, best[j], best[j]);
    }
    if (lp.solve() == LpStatus::Optimal) {
      std::vector<double> polished = lp.values();
      for (std::size_t j = 0; j < n; ++j)
        if (model.variables()[j].kind == VarKind::Binary) polished[j] = best[j];
      if (model.objective_value(polished) <= incumbent + options.gap_abs) best = std::move(polished);
    }
    sol.values = std::move(best);
    sol.objective = model.objective_value(sol.values);
  }
  sol.lp_iterations = lp.iterations();

  if (!exhausted) {
    sol.status = SolveStatus::Limit;
    sol.message = fmt::format("stopped after {} nodes with {} open", sol.nodes, open.size());
  } else if (numerical_trouble) {
    sol.status = SolveStatus::Limit;
    sol.message = "some nodes were skipped after LP numerical failures";
  } else {
    sol.status = std::isfinite(incumbent) ? SolveStatus::Optimal : SolveStatus::Infeasible;
    if (sol.status == SolveStatus::Optimal) sol.dual_bound = std::min(sol.dual_bound, sol.objective);
  }
  sol.wall_seconds = seconds_since(start);
  return sol;
}

}  // namespace rfcmpc
