#include "rfcmpc/scenario_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/core.h>

namespace rfcmpc {

namespace {

// Neumaier compensated sum.
class ExactSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> distance_matrix(std::span<const JointPath> paths) {
  const std::size_t n = paths.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = path_distance(paths[i], paths[j]);
  return d;
}

}  // namespace

void ScenarioSet::validate(double tol) const {
  if (scenarios.empty()) throw std::invalid_argument("ScenarioSet: no scenarios");
  if (probabilities.size() != scenarios.size())
    throw std::invalid_argument("ScenarioSet: probability count mismatch");
  const std::size_t len = scenarios.front().size();
  ExactSum total;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const JointPath& p = scenarios[s];
    if (p.load.size() != len || p.res.size() != len)
      throw std::invalid_argument("ScenarioSet: paths of unequal length");
    for (std::size_t k = 0; k < len; ++k)
      if (!(p.load[k] >= 0.0) || !(p.res[k] >= 0.0))
        throw std::invalid_argument(fmt::format("ScenarioSet: negative power in scenario {}", s));
    if (!(probabilities[s] >= 0.0))
      throw std::invalid_argument("ScenarioSet: negative probability");
    total.add(probabilities[s]);
  }
  if (std::abs(total.value() - 1.0) > tol)
    throw std::invalid_argument(
        fmt::format("ScenarioSet: probabilities sum to {}", total.value()));
}

ScenarioSet ScenarioSet::drop_front(std::size_t n) const {
  ScenarioSet out = *this;
  for (auto& p : out.scenarios) {
    if (p.size() < n) throw std::invalid_argument("ScenarioSet::drop_front: path too short");
    p.load.erase(p.load.begin(), p.load.begin() + static_cast<std::ptrdiff_t>(n));
    p.res.erase(p.res.begin(), p.res.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

double path_distance(const JointPath& a, const JointPath& b) {
  if (a.load.size() != b.load.size() || a.res.size() != b.res.size() ||
      a.load.size() != a.res.size())
    throw std::invalid_argument("path_distance: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.load.size(); ++k) {
    const double dl = a.load[k] - b.load[k];
    const double dr = a.res[k] - b.res[k];
    acc += dl * dl + dr * dr;
  }
  return std::sqrt(acc);
}

double transport_cost(std::span<const JointPath> paths, std::span<const double> weights,
                      std::span<const std::size_t> selected) {
  double cost = 0.0;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s : selected) best = std::min(best, path_distance(paths[i], paths[s]));
    cost += weights[i] * best;
  }
  return cost;
}

ScenarioSet reduce(std::span<const JointPath> paths, std::span<const double> weights,
                   std::size_t target) {
  const std::size_t n = paths.size();
  if (target < 1) throw std::invalid_argument("reduce: target must be >= 1");
  if (target > n)
    throw std::invalid_argument(fmt::format("reduce: target {} exceeds {} paths", target, n));
  if (weights.size() != n) throw std::invalid_argument("reduce: weight count mismatch");

  const std::vector<double> dist = distance_matrix(paths);
  std::vector<bool> chosen(n, false);
  // Distance from every path to the current selected set.
  std::vector<double> to_set(n, std::numeric_limits<double>::infinity());

  for (std::size_t round = 0; round < target; ++round) {
    std::size_t best = n;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n; ++u) {
      if (chosen[u]) continue;
      double cost = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || i == u) continue;
        cost += weights[i] * std::min(to_set[i], dist[i * n + u]);
      }
      if (cost < best_cost) {
        best_cost = cost;
        best = u;
      }
    }
    chosen[best] = true;
    for (std::size_t i = 0; i < n; ++i) to_set[i] = std::min(to_set[i], dist[i * n + best]);
  }

  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < n; ++i)
    if (chosen[i]) selected.push_back(i);

  std::vector<ExactSum> mass(selected.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t owner = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < selected.size(); ++s) {
      const double d = selected[s] == i ? -1.0 : dist[i * n + selected[s]];
      if (d < best) {
        best = d;
        owner = s;
      }
    }
    mass[owner].add(weights[i]);
  }

  ScenarioSet out;
  out.source_index = selected;
  for (std::size_t s = 0; s < selected.size(); ++s) {
    out.scenarios.push_back(paths[selected[s]]);
    out.probabilities.push_back(mass[s].value());
  }
  return out;
}

ScenarioSet reduce(std::span<const JointPath> paths, std::size_t target) {
  const std::vector<double> w(paths.size(), paths.empty() ? 0.0 : 1.0 / paths.size());
  return reduce(paths, w, target);
}

}  // namespace rfcmpc
