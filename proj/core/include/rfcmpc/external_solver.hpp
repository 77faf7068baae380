#pragma once

#include <filesystem>
#include <string>

#include "rfcmpc/milp_model.hpp"
#include "rfcmpc/milp_solver.hpp"

namespace rfcmpc {

/// How to call an external MILP solver. `command` is a shell template in
/// which {mps} and {sol} are replaced by quoted file paths; the tool must read
/// the MPS file and write a solution file in the format of read_solution.
struct ExternalSolverProfile {
  std::string command;
  std::filesystem::path work_dir;  // empty: a fresh directory under the system temp dir
  bool keep_files = false;
  double tolerance = 1e-6;  // bound, scaled-row and integrality check
};

/// Throws BridgeError when the tool is missing, exits nonzero, writes an
/// unparsable file, or returns values that fail the integrity checks.
Solution solve_external(const MilpModel& model, const ExternalSolverProfile& profile);

}  // namespace rfcmpc
