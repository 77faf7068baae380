#pragma once

#include <iosfwd>
#include <vector>

#include "rfcmpc/plant_model.hpp"
#include "rfcmpc/scenario_reduction.hpp"

namespace rfcmpc {

/// The per-step inputs of a stage problem that do not come from configuration.
struct Snapshot {
  PlantState state;
  std::vector<double> prices;
  ScenarioSet scenarios;

  bool operator==(const Snapshot&) const = default;
};

/// Line-oriented text; see docs/formats.md.
void write_snapshot(const Snapshot& snap, std::ostream& out);
/// Throws InputError with a line number on malformed input.
Snapshot read_snapshot(std::istream& in);

}  // namespace rfcmpc
