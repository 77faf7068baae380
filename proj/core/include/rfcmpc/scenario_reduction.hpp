#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rfcmpc/forecaster.hpp"

namespace rfcmpc {

/// S joint (load, RES) paths of equal length with probabilities summing to 1.
struct ScenarioSet {
  std::vector<JointPath> scenarios;
  std::vector<double> probabilities;
  /// Index of each scenario in the reduction input, when it came from one.
  std::vector<std::size_t> source_index;

  std::size_t size() const { return scenarios.size(); }
  std::size_t horizon() const { return scenarios.empty() ? 0 : scenarios.front().size(); }

  /// Throws std::invalid_argument on ragged paths, negative powers or a
  /// probability vector that does not sum to 1 within `tol`.
  void validate(double tol = 1e-12) const;

  /// Drop the first `n` elements of every path (e.g. the current observation).
  ScenarioSet drop_front(std::size_t n) const;

  bool operator==(const ScenarioSet&) const = default;
};

/// Euclidean norm over the concatenated load and RES trajectories, in kW.
double path_distance(const JointPath& a, const JointPath& b);

/// Fast-forward selection of `target` paths under the transport distance.
///
/// Greedily adds the path that minimizes the weighted distance of all
/// unselected paths to the selected set (ties to the lowest index), then moves
/// each unselected path's weight onto its nearest selected path. Output is in
/// ascending input order.
ScenarioSet reduce(std::span<const JointPath> paths, std::span<const double> weights,
                   std::size_t target);

/// Uniform-weight convenience overload.
ScenarioSet reduce(std::span<const JointPath> paths, std::size_t target);

/// Weighted transport cost of representing `paths` by the selected subset.
double transport_cost(std::span<const JointPath> paths, std::span<const double> weights,
                      std::span<const std::size_t> selected);

}  // namespace rfcmpc
