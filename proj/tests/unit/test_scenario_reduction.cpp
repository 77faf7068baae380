#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rfcmpc/scenario_reduction.hpp"

using namespace rfcmpc;

namespace {

JointPath constant_path(std::size_t n, double load, double res) {
  return {std::vector<double>(n, load), std::vector<double>(n, res)};
}

std::vector<JointPath> random_paths(std::mt19937_64& rng, std::size_t n, std::size_t len) {
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<JointPath> out(n);
  for (auto& p : out)
    for (std::size_t k = 0; k < len; ++k) {
      p.load.push_back(u(rng));
      p.res.push_back(u(rng));
    }
  return out;
}

}  // namespace

TEST_CASE("path distance") {
  const JointPath a = constant_path(4, 1.0, 2.0);
  JointPath b = a;
  CHECK(path_distance(a, a) == 0.0);
  b.res[2] += 1.0;
  CHECK(path_distance(a, b) == 1.0);
  CHECK(path_distance(a, b) == path_distance(b, a));
  b.load[0] += 2.0;
  CHECK(path_distance(a, b) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  CHECK_THROWS(path_distance(a, constant_path(3, 1.0, 2.0)));
}

TEST_CASE("degenerate reductions") {
  const std::vector<JointPath> same(6, constant_path(3, 7.0, 1.0));
  const ScenarioSet one = reduce(same, 1);
  REQUIRE(one.size() == 1);
  CHECK(one.probabilities[0] == 1.0);
  CHECK(one.scenarios[0] == same[0]);

  std::mt19937_64 rng(1);
  const auto paths = random_paths(rng, 5, 4);
  const std::vector<double> w{0.1, 0.2, 0.3, 0.25, 0.15};
  const ScenarioSet all = reduce(paths, w, 5);
  CHECK(all.scenarios == paths);
  CHECK(all.probabilities == w);
  const std::vector<std::size_t> ids{0, 1, 2, 3, 4};
  CHECK(transport_cost(paths, w, ids) == 0.0);
  CHECK_THROWS(reduce(paths, 6));
}

TEST_CASE("two clusters reduce to their medoids") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::vector<JointPath> paths;
  for (int i = 0; i < 10; ++i) {
    const double base = i < 3 ? 10.0 : 200.0;
    JointPath p;
    for (int k = 0; k < 4; ++k) {
      p.load.push_back(base + jitter(rng));
      p.res.push_back(base / 2.0 + jitter(rng));
    }
    paths.push_back(p);
  }
  const std::vector<double> w(10, 0.1);
  const ScenarioSet red = reduce(paths, w, 2);
  REQUIRE(red.size() == 2);

  // Brute force over all 2-subsets.
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> arg;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j) {
      const std::vector<std::size_t> sel{i, j};
      const double c = transport_cost(paths, w, sel);
      if (c < best) {
        best = c;
        arg = sel;
      }
    }
  CHECK(red.source_index == arg);
  CHECK(red.probabilities[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(red.probabilities[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("reduction properties on random inputs") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto paths = random_paths(rng, 60, 8);
    const ScenarioSet red = reduce(paths, 10);
    REQUIRE(red.size() == 10);
    CHECK_NOTHROW(red.validate());
    CHECK(std::abs(std::accumulate(red.probabilities.begin(), red.probabilities.end(), 0.0) - 1.0) <= 1e-12);
    CHECK(std::is_sorted(red.source_index.begin(), red.source_index.end()));
    for (std::size_t s = 0; s < red.size(); ++s) CHECK(red.scenarios[s] == paths[red.source_index[s]]);

    // Permuting the input permutes the selection.
    std::vector<std::size_t> perm(paths.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<JointPath> shuffled;
    for (std::size_t i : perm) shuffled.push_back(paths[i]);
    const ScenarioSet red2 = reduce(shuffled, 10);
    std::vector<std::size_t> mapped;
    for (std::size_t i : red2.source_index) mapped.push_back(perm[i]);
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == red.source_index);
  }
}

TEST_CASE("scenario set validation") {
  ScenarioSet s;
  s.scenarios = {constant_path(2, 1.0, 1.0), constant_path(2, 2.0, 2.0)};
  s.probabilities = {0.5, 0.5};
  CHECK_NOTHROW(s.validate());
  s.probabilities = {0.5, 0.6};
  CHECK_THROWS(s.validate());
  s.probabilities = {0.5, 0.5};
  s.scenarios[1].res[0] = -1.0;
  CHECK_THROWS(s.validate());
  s.scenarios[1] = constant_path(3, 1.0, 1.0);
  CHECK_THROWS(s.validate());
  s.scenarios[1] = constant_path(2, 1.0, 1.0);
  const ScenarioSet d = s.drop_front(1);
  CHECK(d.horizon() == 1);
}
