#include "rfcmpc/external_solver.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/mps_io.hpp"

namespace rfcmpc {

namespace fs = std::filesystem;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string replace_all(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
  return text;
}

std::string tail(const fs::path& file, std::size_t max_chars) {
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  return s.size() > max_chars ? s.substr(s.size() - max_chars) : s;
}

SolveStatus parse_status(const std::string& word) {
  if (word == "optimal") return SolveStatus::Optimal;
  if (word == "infeasible") return SolveStatus::Infeasible;
  if (word == "unbounded") return SolveStatus::Unbounded;
  if (word == "limit") return SolveStatus::Limit;
  throw BridgeError(fmt::format("external solver reported unknown status '{}'", word));
}

}  // namespace

Solution solve_external(const MilpModel& model, const ExternalSolverProfile& profile) {
  if (profile.command.find("{mps}") == std::string::npos || profile.command.find("{sol}") == std::string::npos)
    throw BridgeError("external solver command must contain {mps} and {sol}");
  const auto start = std::chrono::steady_clock::now();

  fs::path dir = profile.work_dir;
  if (dir.empty()) {
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    dir = fs::temp_directory_path() / fmt::format("rfcmpc-bridge-{}", stamp);
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw BridgeError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  const fs::path mps = dir / "model.mps";
  const fs::path sol_path = dir / "model.sol";
  const fs::path log = dir / "solver.log";
  fs::remove(sol_path, ec);
  {
    std::ofstream out(mps);
    if (!out) throw BridgeError(fmt::format("cannot write {}", mps.string()));
    write_mps(model, out);
  }

  std::string cmd = replace_all(profile.command, "{mps}", shell_quote(mps.string()));
  cmd = replace_all(cmd, "{sol}", shell_quote(sol_path.string()));
  const int rc = std::system(fmt::format("( {} ) > {} 2>&1", cmd, shell_quote(log.string())).c_str());
  if (rc != 0)
    throw BridgeError(fmt::format("external solver exited with status {}: {}\n{}", rc, cmd, tail(log, 2000)));

  std::ifstream in(sol_path);
  if (!in) throw BridgeError(fmt::format("external solver wrote no solution file {}\n{}", sol_path.string(), tail(log, 2000)));
  SolutionFile file;
  try {
    file = read_solution(in, model.num_variables());
  } catch (const InputError& e) {
    throw BridgeError(fmt::format("unparsable solution from external solver: {}", e.what()));
  }

  Solution sol;
  sol.status = parse_status(file.status);
  sol.values = std::move(file.values);
  if (sol.status == SolveStatus::Optimal && sol.values.empty())
    throw BridgeError("external solver reported optimal without values");
  if (!sol.values.empty()) {
    const auto v = model.violation(sol.values);
    if (v.bound > profile.tolerance || v.row_scaled > profile.tolerance || v.integrality > profile.tolerance)
      throw BridgeError(fmt::format(
          "external solution fails integrity checks: bound {:.3g}, row {:.3g}, integrality {:.3g}",
          v.bound, v.row_scaled, v.integrality));
    sol.objective = model.objective_value(sol.values);
  }
  sol.nodes = 0;
  sol.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  sol.message = "external";
  if (!profile.keep_files && profile.work_dir.empty()) fs::remove_all(dir, ec);
  return sol;
}

}  // namespace rfcmpc
