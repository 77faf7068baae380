#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rfcmpc/milp_model.hpp"

namespace rfcmpc::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, Singular };

const char* to_string(LpStatus s);

/// Bounded revised simplex over [A | -I] (x, y) = 0, where y are row
/// activities bounded by the row senses. The basis inverse is held densely and
/// updated in product form between periodic refactorizations.
///
/// The engine keeps its basis across calls: after `set_bounds` a subsequent
/// `solve` restarts from the previous basis, normally with the dual simplex.
class LpEngine {
 public:
  explicit LpEngine(const MilpModel& model);

  std::size_t num_structural() const { return n_; }
  std::size_t num_rows() const { return m_; }

  void set_bounds(std::size_t j, double lower, double upper);
  double lower(std::size_t j) const { return lo_[j]; }
  double upper(std::size_t j) const { return hi_[j]; }

  LpStatus solve();
  /// Drop the current basis and restart from the all-logical basis.
  void reset_basis();

  double objective() const;
  std::vector<double> values() const;
  /// Lagrangian lower bound from the final reduced costs; equals the
  /// objective at an optimal basis up to rounding.
  double dual_bound() const;
  std::size_t iterations() const { return iterations_; }
  std::size_t refactorizations() const { return refactorizations_; }

 private:
  enum class Pos : unsigned char { Basic, Lower, Upper, Free };
  enum class Outcome { Optimal, Infeasible, Unbounded, IterationLimit, Singular, NeedPrimal };

  Outcome primal();
  Outcome dual();
  bool refactor();
  void recompute_primal();
  void recompute_duals();
  bool make_dual_feasible();
  double nonbasic_value(std::size_t j) const;
  Pos resting_position(std::size_t j) const;
  void ftran(std::size_t j);
  double row_dot(const Eigen::VectorXd& rho, std::size_t j) const;
  void pivot(std::size_t r, std::size_t q);
  double primal_infeasibility() const;
  double dual_infeasibility() const;
  double row_residual() const;
  double ptol(double bound) const;
  bool is_fixed(std::size_t j) const { return lo_[j] == hi_[j]; }

  std::size_t n_ = 0;  // structural columns
  std::size_t m_ = 0;  // rows (= logical columns)
  std::vector<std::vector<std::pair<std::size_t, double>>> cols_;
  std::vector<double> lo_, hi_, cost_;
  std::vector<double> x_, d_;
  std::vector<Pos> pos_;
  std::vector<std::size_t> head_;  // basis position -> column
  Eigen::MatrixXd binv_;           // (position, row)
  Eigen::VectorXd alpha_;          // B^-1 a_q of the current entering column
  std::vector<Eigen::Index> nz_;   // scratch: nonzero positions of alpha_
  Eigen::VectorXd tau_;            // scratch for the weight update
  Eigen::VectorXd weight_;         // squared row norms of B^-1 (dual pricing)
  std::size_t updates_ = 0;
  std::size_t iterations_ = 0;
  std::size_t refactorizations_ = 0;
  std::size_t degenerate_run_ = 0;
};

}  // namespace rfcmpc::detail
