#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rfcmpc/milp_model.hpp"

namespace rfcmpc {

/// Fixed-format MPS with one coefficient per COLUMNS line. Numbers use the
/// shortest text that round-trips exactly, so write -> read -> write is
/// byte-identical and the model compares equal.
void write_mps(const MilpModel& model, std::ostream& out);
std::string to_mps(const MilpModel& model);

/// Reads files produced by write_mps (free-format whitespace is accepted).
/// Throws InputError on anything else.
MilpModel read_mps(std::istream& in);

/// `<variable name> <value>` per line, variables in id order.
void write_solution(std::span<const double> values, std::ostream& out);

struct SolutionFile {
  std::string status = "optimal";  // optional leading `status <word>` line
  std::vector<double> values;      // empty unless every variable is listed
};

/// Throws InputError on unknown or duplicate names, bad numbers, or a
/// partial assignment.
SolutionFile read_solution(std::istream& in, std::size_t num_variables);

}  // namespace rfcmpc
