#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rfcmpc/errors.hpp"

namespace rfcmpc {

/// A joint (load, RES) power trajectory in kW, both vectors of equal length.
struct JointPath {
  std::vector<double> load;
  std::vector<double> res;

  std::size_t size() const { return load.size(); }
  bool operator==(const JointPath&) const = default;
};

struct Observation {
  double load = 0.0;  // kW
  double res = 0.0;   // kW
};

/// Per-variable affine map onto [0, 1] used for every distance test.
struct Normalization {
  std::array<double, 2> min{0.0, 0.0};
  std::array<double, 2> max{1.0, 1.0};

  static Normalization fit(std::span<const Observation> data);
  std::array<double, 2> apply(const Observation& obs) const;
  std::array<double, 2> apply(const std::array<double, 2>& raw) const;
  bool operator==(const Normalization&) const = default;
};

struct DmcState {
  std::array<double, 2> mean{};      // kW
  std::array<double, 2> variance{};  // kW^2
  double covariance = 0.0;
  std::uint64_t count = 0;
  bool operator==(const DmcState&) const = default;
};

/// Growing discrete Markov chain over the (load, RES) plane.
///
/// States live in raw kW; matching and the spawn test work on normalized
/// coordinates. Edge weights are integer transition counts, probabilities are
/// derived on demand. An edge created when a state is spawned carries count 0
/// until a transition is actually observed along it.
class DmcGraph {
 public:
  using StateId = std::size_t;

  struct Match {
    StateId first;
    std::optional<StateId> second;
  };

  DmcGraph() = default;
  DmcGraph(double tau, Normalization norm);

  double tau() const { return tau_; }
  const Normalization& normalization() const { return norm_; }
  const std::vector<DmcState>& states() const { return states_; }
  std::optional<StateId> last_state() const { return last_; }

  /// Outgoing edges of `from` as target -> observed transition count.
  const std::map<StateId, std::uint64_t>& edges(StateId from) const { return edges_.at(from); }
  std::size_t edge_count() const;

  /// Matching, state adaptation, weight adaptation and edge adaptation, in
  /// that order. Throws InputError for non-finite or negative observations.
  StateId ingest(const Observation& obs);

  /// Two nearest states in normalized distance, ties to the lower id.
  Match match(const Observation& obs) const;

  /// Transition probabilities out of `from`; empty for dead-end states.
  std::vector<std::pair<StateId, double>> transition_probabilities(StateId from) const;

  /// Moment matrix [[v1, c], [c, v2]] of a state, covariance shrunk to PSD.
  std::array<double, 3> repaired_moments(StateId id) const;

  std::uint64_t total_count() const;

  void write(std::ostream& out) const;
  static DmcGraph read(std::istream& in);

  bool operator==(const DmcGraph&) const = default;

 private:
  double tau_ = 0.1;
  Normalization norm_{};
  std::vector<DmcState> states_;
  std::vector<std::map<StateId, std::uint64_t>> edges_;
  std::optional<StateId> last_;
};

/// Spawn test in normalized coordinates: strictly outside the circle whose
/// diameter is first-second, and farther than `tau` from `first`. Without a
/// second state only the tau test applies.
bool should_spawn(const std::array<double, 2>& obs, const std::array<double, 2>& first,
                  const std::optional<std::array<double, 2>>& second, double tau);

/// Train a fresh chain: fit normalization on `history`, then ingest in order.
DmcGraph train(std::span<const Observation> history, double tau);

/// Sample `n_paths` joint paths of length horizon + 1. Element 0 is the
/// current observation; later elements walk the chain from the state matched
/// to it and add a bivariate normal draw with that state's moments. Output is
/// clamped to >= 0 and depends only on (graph, current, horizon, seed).
std::vector<JointPath> sample_paths(const DmcGraph& graph, const Observation& current,
                                    std::size_t horizon, std::size_t n_paths,
                                    std::uint64_t seed);

}  // namespace rfcmpc
