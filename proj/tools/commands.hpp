#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace rfcmpc::cli {

/// Options shared by every subcommand.
struct Common {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> external_solver;
};

struct TrainArgs {
  std::optional<std::filesystem::path> history;
  std::optional<double> tau;
  std::string output = "graph.dmc";
};

struct ForecastArgs {
  std::optional<std::filesystem::path> graph;
  std::string at;  // timestamp whose preceding observation seeds the paths
  std::string output = "paths.csv";
};

struct ReduceArgs {
  std::filesystem::path paths;
  std::optional<std::string> at;  // also write a snapshot for this step
  std::string output = "scenarios.csv";
};

struct SolveOnceArgs {
  std::filesystem::path snapshot;
  std::optional<std::filesystem::path> export_mps;
  std::string output = "plan.csv";
};

struct SimulateArgs {
  bool compare = false;  // also run the no-RFC baseline and report the difference
};

struct GenerateArgs {
  std::string start = "2024-05-06T00:00:00Z";
  int history_days = 30;
  int days = 8;
  std::uint64_t seed = 20240506;
};

int train(const Common& common, const TrainArgs& args);
int forecast(const Common& common, const ForecastArgs& args);
int reduce_scenarios(const Common& common, const ReduceArgs& args);
int solve_once(const Common& common, const SolveOnceArgs& args);
int simulate(const Common& common, const SimulateArgs& args);
int generate_data(const Common& common, const GenerateArgs& args);
int config_template();

}  // namespace rfcmpc::cli
