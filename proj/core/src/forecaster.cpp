#include "rfcmpc/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <fmt/core.h>

#include "rfcmpc/numfmt.hpp"

namespace rfcmpc {

namespace {

constexpr const char* kGraphMagic = "rfcmpc-dmc";
constexpr int kGraphVersion = 1;

double sq_distance(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

void check_observation(const Observation& obs) {
  if (!std::isfinite(obs.load) || !std::isfinite(obs.res))
    throw InputError(fmt::format("observation ({}, {}) is not finite", obs.load, obs.res));
  if (obs.load < 0.0 || obs.res < 0.0)
    throw InputError(fmt::format("observation ({}, {}) is negative", obs.load, obs.res));
}

std::string expect_token(std::istream& in, const char* keyword) {
  std::string tok;
  if (!(in >> tok)) throw InputError(fmt::format("graph file: missing '{}'", keyword));
  return tok;
}

void expect_keyword(std::istream& in, const char* keyword) {
  if (expect_token(in, keyword) != keyword)
    throw InputError(fmt::format("graph file: expected '{}'", keyword));
}

double read_double(std::istream& in, const char* what) {
  return parse_double(expect_token(in, what), what);
}

long long read_int(std::istream& in, const char* what) {
  return parse_int(expect_token(in, what), what);
}

}  // namespace

Normalization Normalization::fit(std::span<const Observation> data) {
  Normalization n;
  if (data.empty()) return n;
  n.min = {data[0].load, data[0].res};
  n.max = n.min;
  for (const auto& o : data) {
    n.min[0] = std::min(n.min[0], o.load);
    n.max[0] = std::max(n.max[0], o.load);
    n.min[1] = std::min(n.min[1], o.res);
    n.max[1] = std::max(n.max[1], o.res);
  }
  return n;
}

std::array<double, 2> Normalization::apply(const std::array<double, 2>& raw) const {
  std::array<double, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const double span = max[i] - min[i];
    // A constant training series leaves the axis unscaled.
    out[i] = span > 0.0 ? (raw[i] - min[i]) / span : raw[i] - min[i];
  }
  return out;
}

std::array<double, 2> Normalization::apply(const Observation& obs) const {
  return apply(std::array<double, 2>{obs.load, obs.res});
}

DmcGraph::DmcGraph(double tau, Normalization norm) : tau_(tau), norm_(norm) {
  if (!(tau > 0.0)) throw std::invalid_argument("DmcGraph: tau must be > 0");
}

std::size_t DmcGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.size();
  return n;
}

std::uint64_t DmcGraph::total_count() const {
  std::uint64_t n = 0;
  for (const auto& s : states_) n += s.count;
  return n;
}

DmcGraph::Match DmcGraph::match(const Observation& obs) const {
  if (states_.empty()) throw std::logic_error("DmcGraph::match on an empty graph");
  const auto p = norm_.apply(obs);
  StateId best = 0;
  std::optional<StateId> second;
  double best_d = std::numeric_limits<double>::infinity();
  double second_d = std::numeric_limits<double>::infinity();
  // Strict comparisons keep the lower id on ties.
  for (StateId id = 0; id < states_.size(); ++id) {
    const double d = sq_distance(p, norm_.apply(states_[id].mean));
    if (d < best_d) {
      if (best_d < std::numeric_limits<double>::infinity()) {
        second = best;
        second_d = best_d;
      }
      best = id;
      best_d = d;
    } else if (d < second_d || !second) {
      second = id;
      second_d = d;
    }
  }
  return {best, second};
}

bool should_spawn(const std::array<double, 2>& obs, const std::array<double, 2>& first,
                  const std::optional<std::array<double, 2>>& second, double tau) {
  const bool beyond_tau = std::sqrt(sq_distance(obs, first)) > tau;
  if (!second) return beyond_tau;
  const std::array<double, 2> center{0.5 * (first[0] + (*second)[0]),
                                     0.5 * (first[1] + (*second)[1])};
  const double radius_sq = 0.25 * sq_distance(first, *second);
  const bool outside_circle = sq_distance(obs, center) > radius_sq;
  return outside_circle && beyond_tau;
}

DmcGraph::StateId DmcGraph::ingest(const Observation& obs) {
  check_observation(obs);
  StateId current;
  if (states_.empty()) {
    states_.push_back(DmcState{{obs.load, obs.res}, {0.0, 0.0}, 0.0, 1});
    edges_.emplace_back();
    current = 0;
  } else {
    const Match m = match(obs);
    const auto p = norm_.apply(obs);
    std::optional<std::array<double, 2>> second;
    if (m.second) second = norm_.apply(states_[*m.second].mean);
    if (should_spawn(p, norm_.apply(states_[m.first].mean), second, tau_)) {
      current = states_.size();
      states_.push_back(DmcState{{obs.load, obs.res}, {0.0, 0.0}, 0.0, 1});
      edges_.emplace_back();
      edges_[m.first].try_emplace(current, 0);
    } else {
      current = m.first;
      DmcState& s = states_[current];
      const double n = static_cast<double>(s.count);
      const std::array<double, 2> o{obs.load, obs.res};
      // Means first; the moment updates use the updated means.
      // Incremental form of (mean * n + o) / (n + 1); exact when o equals the mean.
      for (int i = 0; i < 2; ++i) s.mean[i] += (o[i] - s.mean[i]) / (n + 1.0);
      for (int i = 0; i < 2; ++i) {
        const double dev = o[i] - s.mean[i];
        s.variance[i] = (s.variance[i] * n + dev * dev) / (n + 1.0);
      }
      s.covariance =
          (s.covariance * n + (o[0] - s.mean[0]) * (o[1] - s.mean[1])) / (n + 1.0);
      s.count += 1;
    }
  }
  if (last_) edges_[*last_][current] += 1;
  last_ = current;
  return current;
}

std::vector<std::pair<DmcGraph::StateId, double>> DmcGraph::transition_probabilities(
    StateId from) const {
  const auto& out = edges_.at(from);
  std::uint64_t total = 0;
  for (const auto& [to, c] : out) total += c;
  std::vector<std::pair<StateId, double>> probs;
  if (total == 0) return probs;
  for (const auto& [to, c] : out)
    if (c > 0) probs.emplace_back(to, static_cast<double>(c) / static_cast<double>(total));
  return probs;
}

std::array<double, 3> DmcGraph::repaired_moments(StateId id) const {
  const DmcState& s = states_.at(id);
  const double v1 = std::max(0.0, s.variance[0]);
  const double v2 = std::max(0.0, s.variance[1]);
  double c = s.covariance;
  const double bound = std::sqrt(v1 * v2);
  if (std::abs(c) > bound) c = std::copysign(bound, c);
  return {v1, v2, c};
}

void DmcGraph::write(std::ostream& out) const {
  out << kGraphMagic << ' ' << kGraphVersion << '\n';
  out << "tau " << format_exact(tau_) << '\n';
  out << "normalization " << format_exact(norm_.min[0]) << ' ' << format_exact(norm_.max[0])
      << ' ' << format_exact(norm_.min[1]) << ' ' << format_exact(norm_.max[1]) << '\n';
  out << "last " << (last_ ? static_cast<long long>(*last_) : -1LL) << '\n';
  out << "states " << states_.size() << '\n';
  for (StateId id = 0; id < states_.size(); ++id) {
    const DmcState& s = states_[id];
    out << id << ' ' << format_exact(s.mean[0]) << ' ' << format_exact(s.mean[1]) << ' '
        << format_exact(s.variance[0]) << ' ' << format_exact(s.variance[1]) << ' '
        << format_exact(s.covariance) << ' ' << s.count << '\n';
  }
  out << "edges " << edge_count() << '\n';
  for (StateId from = 0; from < edges_.size(); ++from)
    for (const auto& [to, c] : edges_[from]) out << from << ' ' << to << ' ' << c << '\n';
}

DmcGraph DmcGraph::read(std::istream& in) {
  expect_keyword(in, kGraphMagic);
  const long long version = read_int(in, "version");
  if (version != kGraphVersion)
    throw InputError(fmt::format("graph file: unsupported version {}", version));
  DmcGraph g;
  expect_keyword(in, "tau");
  g.tau_ = read_double(in, "tau");
  expect_keyword(in, "normalization");
  g.norm_.min[0] = read_double(in, "normalization");
  g.norm_.max[0] = read_double(in, "normalization");
  g.norm_.min[1] = read_double(in, "normalization");
  g.norm_.max[1] = read_double(in, "normalization");
  expect_keyword(in, "last");
  const long long last = read_int(in, "last");
  expect_keyword(in, "states");
  const long long n = read_int(in, "state count");
  if (n < 0) throw InputError("graph file: negative state count");
  g.states_.resize(static_cast<std::size_t>(n));
  g.edges_.resize(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    if (read_int(in, "state id") != i) throw InputError("graph file: state ids out of order");
    DmcState& s = g.states_[static_cast<std::size_t>(i)];
    s.mean[0] = read_double(in, "mean");
    s.mean[1] = read_double(in, "mean");
    s.variance[0] = read_double(in, "variance");
    s.variance[1] = read_double(in, "variance");
    s.covariance = read_double(in, "covariance");
    const long long count = read_int(in, "count");
    if (count < 1) throw InputError("graph file: state count must be >= 1");
    s.count = static_cast<std::uint64_t>(count);
  }
  expect_keyword(in, "edges");
  const long long e = read_int(in, "edge count");
  for (long long i = 0; i < e; ++i) {
    const long long from = read_int(in, "edge source");
    const long long to = read_int(in, "edge target");
    const long long c = read_int(in, "edge count");
    if (from < 0 || from >= n || to < 0 || to >= n || c < 0)
      throw InputError(fmt::format("graph file: invalid edge {} -> {}", from, to));
    g.edges_[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)] =
        static_cast<std::uint64_t>(c);
  }
  if (last >= n || last < -1) throw InputError("graph file: last state out of range");
  if (last >= 0) g.last_ = static_cast<StateId>(last);
  return g;
}

DmcGraph train(std::span<const Observation> history, double tau) {
  DmcGraph g(tau, Normalization::fit(history));
  for (const auto& o : history) g.ingest(o);
  return g;
}

std::vector<JointPath> sample_paths(const DmcGraph& graph, const Observation& current,
                                    std::size_t horizon, std::size_t n_paths,
                                    std::uint64_t seed) {
  if (graph.states().empty()) throw std::invalid_argument("sample_paths: empty graph");
  if (horizon < 1) throw std::invalid_argument("sample_paths: horizon must be >= 1");
  check_observation(current);

  const std::size_t n_states = graph.states().size();
  // Cumulative integer counts per state; empty rows self-loop.
  std::vector<std::vector<std::pair<DmcGraph::StateId, std::uint64_t>>> cumulative(n_states);
  std::vector<std::array<double, 3>> chol(n_states);
  for (DmcGraph::StateId s = 0; s < n_states; ++s) {
    std::uint64_t acc = 0;
    for (const auto& [to, c] : graph.edges(s)) {
      if (c == 0) continue;
      acc += c;
      cumulative[s].emplace_back(to, acc);
    }
    const auto [v1, v2, c] = graph.repaired_moments(s);
    const double l11 = std::sqrt(v1);
    const double l21 = l11 > 0.0 ? c / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, v2 - l21 * l21));
    chol[s] = {l11, l21, l22};
  }

  const DmcGraph::StateId start = graph.match(current).first;
  std::vector<JointPath> paths(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);

    JointPath& path = paths[p];
    path.load.reserve(horizon + 1);
    path.res.reserve(horizon + 1);
    path.load.push_back(current.load);
    path.res.push_back(current.res);
    DmcGraph::StateId s = start;
    for (std::size_t k = 1; k <= horizon; ++k) {
      const auto& row = cumulative[s];
      if (!row.empty()) {
        std::uniform_int_distribution<std::uint64_t> pick(0, row.back().second - 1);
        const std::uint64_t r = pick(rng);
        const auto it = std::upper_bound(row.begin(), row.end(), r,
                                         [](std::uint64_t v, const auto& e) { return v < e.second; });
        s = it->first;
      }
      const auto& mean = graph.states()[s].mean;
      const auto& l = chol[s];
      const double z1 = normal(rng);
      const double z2 = normal(rng);
      path.load.push_back(std::max(0.0, mean[0] + l[0] * z1));
      path.res.push_back(std::max(0.0, mean[1] + l[1] * z1 + l[2] * z2));
    }
  }
  return paths;
}

}  // namespace rfcmpc
