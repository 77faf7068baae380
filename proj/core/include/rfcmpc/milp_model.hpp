#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rfcmpc {

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const Variable&) const = default;
};

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;

  bool operator==(const LinearTerm&) const = default;
};

struct Constraint {
  std::vector<LinearTerm> terms;  // sorted by var, no duplicates, no zeros
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;

  bool operator==(const Constraint&) const = default;
};

/// Solver-neutral mixed-integer linear program, always a minimization.
///
/// Variables are exported as x<id> and rows as c<id>. SOS2 groups are ordered
/// lists of continuous [0, 1] members; they document adjacency structure that
/// the model must also enforce through its own rows and binaries.
class MilpModel {
 public:
  std::string name = "RFCMPC";

  std::size_t add_continuous(double lower, double upper);
  std::size_t add_binary();
  /// Terms are canonicalized: sorted by variable, duplicates merged, zeros dropped.
  std::size_t add_constraint(std::vector<LinearTerm> terms, Sense sense, double rhs);
  void add_sos2(std::vector<std::size_t> members);
  void set_objective(std::size_t var, double coef);
  void add_objective(std::size_t var, double coef);
  void set_bounds(std::size_t var, double lower, double upper);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  std::size_t num_binaries() const;

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::vector<std::vector<std::size_t>>& sos2_groups() const { return sos2_; }
  const std::vector<double>& objective() const { return objective_; }

  double objective_value(std::span<const double> x) const;
  /// Row activity a_i . x.
  double activity(std::size_t row, std::span<const double> x) const;
  /// Amount by which row `row` is violated at `x` (0 when satisfied).
  double row_violation(std::size_t row, std::span<const double> x) const;

  /// Largest bound, row and integrality violation at `x`.
  struct Violation {
    double bound = 0.0;
    double row = 0.0;
    double row_scaled = 0.0;  // row violation / (1 + |rhs|)
    double integrality = 0.0;
    double sos2 = 0.0;  // largest mass outside the best adjacent pair
  };
  Violation violation(std::span<const double> x) const;

  /// Throws std::invalid_argument if a row references a missing variable,
  /// an SOS2 member is not continuous in [0, 1], or a binary has bounds
  /// outside {0, 1}.
  void validate() const;

  bool operator==(const MilpModel&) const = default;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<std::size_t>> sos2_;
  std::vector<double> objective_;
};

std::string variable_name(std::size_t id);
std::string row_name(std::size_t id);

}  // namespace rfcmpc
