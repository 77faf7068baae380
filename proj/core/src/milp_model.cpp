#include "rfcmpc/milp_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace rfcmpc {

std::string variable_name(std::size_t id) { return fmt::format("x{}", id); }
std::string row_name(std::size_t id) { return fmt::format("c{}", id); }

std::size_t MilpModel::add_continuous(double lower, double upper) {
  if (lower > upper)
    throw std::invalid_argument(fmt::format("add_continuous: bounds [{}, {}]", lower, upper));
  variables_.push_back({VarKind::Continuous, lower, upper});
  objective_.push_back(0.0);
  return variables_.size() - 1;
}

std::size_t MilpModel::add_binary() {
  variables_.push_back({VarKind::Binary, 0.0, 1.0});
  objective_.push_back(0.0);
  return variables_.size() - 1;
}

std::size_t MilpModel::add_constraint(std::vector<LinearTerm> terms, Sense sense, double rhs) {
  std::sort(terms.begin(), terms.end(),
            [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
  std::vector<LinearTerm> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    if (t.var >= variables_.size())
      throw std::invalid_argument(fmt::format("add_constraint: unknown variable {}", t.var));
    if (!merged.empty() && merged.back().var == t.var)
      merged.back().coef += t.coef;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const LinearTerm& t) { return t.coef == 0.0; });
  constraints_.push_back({std::move(merged), sense, rhs});
  return constraints_.size() - 1;
}

void MilpModel::add_sos2(std::vector<std::size_t> members) {
  for (std::size_t v : members)
    if (v >= variables_.size())
      throw std::invalid_argument(fmt::format("add_sos2: unknown variable {}", v));
  sos2_.push_back(std::move(members));
}

void MilpModel::set_objective(std::size_t var, double coef) { objective_.at(var) = coef; }
void MilpModel::add_objective(std::size_t var, double coef) { objective_.at(var) += coef; }

void MilpModel::set_bounds(std::size_t var, double lower, double upper) {
  Variable& v = variables_.at(var);
  v.lower = lower;
  v.upper = upper;
}

std::size_t MilpModel::num_binaries() const {
  return static_cast<std::size_t>(std::count_if(
      variables_.begin(), variables_.end(),
      [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

double MilpModel::objective_value(std::span<const double> x) const {
  double obj = 0.0;
  for (std::size_t j = 0; j < objective_.size(); ++j)
    if (objective_[j] != 0.0) obj += objective_[j] * x[j];
  return obj;
}

double MilpModel::activity(std::size_t row, std::span<const double> x) const {
  double a = 0.0;
  for (const auto& t : constraints_[row].terms) a += t.coef * x[t.var];
  return a;
}

double MilpModel::row_violation(std::size_t row, std::span<const double> x) const {
  const Constraint& c = constraints_[row];
  const double a = activity(row, x);
  switch (c.sense) {
    case Sense::LessEqual: return std::max(0.0, a - c.rhs);
    case Sense::GreaterEqual: return std::max(0.0, c.rhs - a);
    case Sense::Equal: return std::abs(a - c.rhs);
  }
  return 0.0;
}

MilpModel::Violation MilpModel::violation(std::span<const double> x) const {
  if (x.size() != variables_.size())
    throw std::invalid_argument("violation: value vector has the wrong size");
  Violation v;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const Variable& var = variables_[j];
    v.bound = std::max({v.bound, var.lower - x[j], x[j] - var.upper});
    if (var.kind == VarKind::Binary)
      v.integrality = std::max(v.integrality, std::abs(x[j] - std::round(x[j])));
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const double r = row_violation(i, x);
    v.row = std::max(v.row, r);
    v.row_scaled = std::max(v.row_scaled, r / (1.0 + std::abs(constraints_[i].rhs)));
  }
  for (const auto& group : sos2_) {
    double total = 0.0;
    double best_pair = 0.0;
    for (std::size_t l = 0; l < group.size(); ++l) {
      total += std::abs(x[group[l]]);
      const double pair =
          std::abs(x[group[l]]) + (l + 1 < group.size() ? std::abs(x[group[l + 1]]) : 0.0);
      best_pair = std::max(best_pair, pair);
    }
    v.sos2 = std::max(v.sos2, total - best_pair);
  }
  return v;
}

void MilpModel::validate() const {
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    const Variable& v = variables_[j];
    if (v.lower > v.upper)
      throw std::invalid_argument(fmt::format("{} has crossed bounds", variable_name(j)));
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
      throw std::invalid_argument(fmt::format("binary {} bounds exceed [0,1]", variable_name(j)));
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    for (const auto& t : constraints_[i].terms)
      if (t.var >= variables_.size())
        throw std::invalid_argument(fmt::format("{} references x{}", row_name(i), t.var));
  for (const auto& group : sos2_)
    for (std::size_t m : group) {
      if (m >= variables_.size())
        throw std::invalid_argument(fmt::format("SOS2 group references x{}", m));
      const Variable& v = variables_[m];
      if (v.kind != VarKind::Continuous || v.lower < 0.0 || v.upper > 1.0)
        throw std::invalid_argument(
            fmt::format("SOS2 member {} must be continuous within [0,1]", variable_name(m)));
    }
}

}  // namespace rfcmpc
