#pragma once

#include <stdexcept>

namespace rfcmpc {

/// Malformed or out-of-contract input data (CSV rows, observations, files).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: unknown key, unparsable value, missing referenced file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stage data that cannot yield a feasible model (detected before solving).
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver did not reach an optimal status.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A decoded solution violates the model beyond tolerance.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// External solver invocation or its output failed.
class BridgeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfcmpc
