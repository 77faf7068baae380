#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rfcmpc/milp_model.hpp"
#include "rfcmpc/plant_model.hpp"
#include "rfcmpc/stage_problem.hpp"

namespace oracle {

// Efficiency surfaces written out term by term from the published
// coefficients, without going through PlantParams.
double threshold_w_per_cell(double theta);
double eta_el(double x_kw_per_cell, double theta);
double eta_f(double x_kw_per_cell, double theta);

/// Minimum of c.y over a bounded polyhedron {y : rows, lo <= y <= hi} by
/// enumerating vertices. Only for a handful of variables.
struct SmallLp {
  std::vector<std::vector<double>> a;
  std::vector<rfcmpc::Sense> sense;
  std::vector<double> b;
  std::vector<double> lo, hi, c;
};
std::optional<double> vertex_min(const SmallLp& lp);

/// Best objective of a MILP over every binary assignment, each completed by
/// vertex enumeration over the continuous variables (all bounded).
std::optional<double> enumerate_milp(const rfcmpc::MilpModel& model);

/// Random MILP with `binaries` binaries and up to three bounded continuous
/// variables; small integer coefficients, mixed row senses.
rfcmpc::MilpModel random_milp(std::mt19937_64& rng, std::size_t binaries);

/// Random but valid stage data: T steps, S scenarios, L uniform breakpoints.
rfcmpc::StageData random_stage(std::mt19937_64& rng, std::size_t T, std::size_t S, std::size_t L);

/// Optimal stage objective by enumerating every legal mode sequence (anchored
/// at the previous mode, switch limit checked against the history) and every
/// conversion piece of the active steps, solving one LP per combination.
/// Flows come from the efficiency formulas above, not from the table values.
struct SequenceOracle {
  std::optional<double> objective;
  std::size_t sequences = 0;  // legal sequences examined
};
SequenceOracle enumerate_modes(const rfcmpc::StageData& data);

}  // namespace oracle
