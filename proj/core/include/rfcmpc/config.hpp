#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rfcmpc/simulator.hpp"

namespace rfcmpc {

struct ConfigKey {
  std::string name;
  std::string default_value;  // empty: unset
  std::string unit;
  std::string description;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

struct AppConfig {
  RunConfig run;
  std::filesystem::path history_csv;
  std::filesystem::path actuals_csv;
  std::filesystem::path prices_csv;
  std::filesystem::path graph_file;  // optional pre-trained chain
  std::filesystem::path out_dir = "out";
};

/// Parses `key = value` lines (`#` starts a comment). Relative paths resolve
/// against `base_dir`. Throws ConfigError naming the key for unknown keys,
/// duplicates, bad values, or (when `check_files`) missing input files.
AppConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, bool check_files = true);
AppConfig load_config(const std::filesystem::path& path, bool check_files = true);

/// Default configuration rendered as a config file, one documented key per line.
void write_config_template(std::ostream& out);

}  // namespace rfcmpc
