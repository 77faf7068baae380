#include "lp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfcmpc::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kVerifyTol = 1e-7;
constexpr std::size_t kRefactorEvery = 120;
constexpr std::size_t kDegenerateBeforeBland = 50;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
    case LpStatus::Singular: return "singular";
  }
  return "?";
}

LpEngine::LpEngine(const MilpModel& model)
    : n_(model.num_variables()), m_(model.num_constraints()) {
  const std::size_t total = n_ + m_;
  cols_.resize(n_);
  lo_.resize(total);
  hi_.resize(total);
  cost_.assign(total, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = model.variables()[j].lower;
    hi_[j] = model.variables()[j].upper;
    cost_[j] = model.objective()[j];
  }
  for (std::size_t i = 0; i < m_; ++i) {
    const Constraint& c = model.constraints()[i];
    for (const auto& t : c.terms) cols_[t.var].emplace_back(i, t.coef);
    const std::size_t y = n_ + i;
    lo_[y] = c.sense == Sense::LessEqual ? -kInf : c.rhs;
    hi_[y] = c.sense == Sense::GreaterEqual ? kInf : c.rhs;
  }
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  pos_.assign(total, Pos::Lower);
  head_.resize(m_);
  alpha_.resize(static_cast<Eigen::Index>(m_));
  tau_.resize(static_cast<Eigen::Index>(m_));
  reset_basis();
}

LpEngine::Pos LpEngine::resting_position(std::size_t j) const {
  const bool lo_finite = std::isfinite(lo_[j]);
  const bool hi_finite = std::isfinite(hi_[j]);
  if (lo_finite && hi_finite) return cost_[j] < 0.0 ? Pos::Upper : Pos::Lower;
  if (lo_finite) return Pos::Lower;
  if (hi_finite) return Pos::Upper;
  return Pos::Free;
}

void LpEngine::reset_basis() {
  const auto m = static_cast<Eigen::Index>(m_);
  binv_ = -Eigen::MatrixXd::Identity(m, m);
  weight_ = Eigen::VectorXd::Ones(m);
  for (std::size_t j = 0; j < n_; ++j) pos_[j] = resting_position(j);
  for (std::size_t i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_[n_ + i] = Pos::Basic;
  }
  updates_ = 0;
  degenerate_run_ = 0;
  for (std::size_t j = 0; j < n_; ++j) x_[j] = nonbasic_value(j);
}

void LpEngine::set_bounds(std::size_t j, double lower, double upper) {
  lo_[j] = lower;
  hi_[j] = upper;
  if (pos_[j] == Pos::Basic) return;
  if ((pos_[j] == Pos::Lower && !std::isfinite(lower)) ||
      (pos_[j] == Pos::Upper && !std::isfinite(upper)) || pos_[j] == Pos::Free)
    pos_[j] = resting_position(j);
  x_[j] = nonbasic_value(j);
}

double LpEngine::nonbasic_value(std::size_t j) const {
  switch (pos_[j]) {
    case Pos::Lower: return lo_[j];
    case Pos::Upper: return hi_[j];
    default: return 0.0;
  }
}

double LpEngine::ptol(double bound) const { return 1e-9 * (1.0 + std::abs(bound)); }

void LpEngine::ftran(std::size_t j) {
  if (j >= n_) {
    alpha_ = -binv_.col(static_cast<Eigen::Index>(j - n_));
    return;
  }
  alpha_.setZero();
  for (const auto& [i, v] : cols_[j]) alpha_.noalias() += v * binv_.col(static_cast<Eigen::Index>(i));
}

double LpEngine::row_dot(const Eigen::VectorXd& rho, std::size_t j) const {
  if (j >= n_) return -rho[static_cast<Eigen::Index>(j - n_)];
  double s = 0.0;
  for (const auto& [i, v] : cols_[j]) s += v * rho[static_cast<Eigen::Index>(i)];
  return s;
}

bool LpEngine::refactor() {
  ++refactorizations_;
  updates_ = 0;
  const std::size_t m = m_;
  std::vector<std::size_t> logical_pos(m, kNone);  // row -> basis position of its logical
  std::vector<std::size_t> s_pos;                  // positions holding structurals
  for (std::size_t p = 0; p < m; ++p) {
    if (head_[p] >= n_)
      logical_pos[head_[p] - n_] = p;
    else
      s_pos.push_back(p);
  }
  std::vector<std::size_t> s_rows, l_rows;
  std::vector<std::size_t> index_of(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    if (logical_pos[i] == kNone) {
      index_of[i] = s_rows.size();
      s_rows.push_back(i);
    } else {
      index_of[i] = l_rows.size();
      l_rows.push_back(i);
    }
  }
  const auto k = static_cast<Eigen::Index>(s_pos.size());
  const auto nl = static_cast<Eigen::Index>(l_rows.size());
  if (static_cast<std::size_t>(k) != s_rows.size()) return false;

  // Rows ordered (uncovered, covered), columns (structural, logical):
  //   B = [M 0; C -I]  =>  B^-1 = [M^-1 0; C M^-1 -I].
  binv_.setZero();
  if (k > 0) {
    std::vector<Eigen::Triplet<double>> m_entries;
    std::vector<Eigen::Triplet<double>> c_entries;
    for (Eigen::Index a = 0; a < k; ++a) {
      for (const auto& [i, v] : cols_[head_[s_pos[static_cast<std::size_t>(a)]]]) {
        const auto idx = static_cast<Eigen::Index>(index_of[i]);
        if (logical_pos[i] == kNone)
          m_entries.emplace_back(idx, a, v);
        else
          c_entries.emplace_back(idx, a, v);
      }
    }
    Eigen::SparseMatrix<double> mm(k, k);
    mm.setFromTriplets(m_entries.begin(), m_entries.end());
    mm.makeCompressed();
    Eigen::SparseMatrix<double> cc(nl, k);
    cc.setFromTriplets(c_entries.begin(), c_entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(mm);
    lu.factorize(mm);
    if (lu.info() != Eigen::Success) return false;
    const Eigen::MatrixXd minv = lu.solve(Eigen::MatrixXd::Identity(k, k));
    if (lu.info() != Eigen::Success || !minv.allFinite()) return false;
    // A huge inverse means a nearly singular basis.
    double scale = 0.0;
    for (const auto& t : m_entries) scale = std::max(scale, std::abs(t.value()));
    if (minv.cwiseAbs().maxCoeff() * scale > 1e13) return false;
    const Eigen::MatrixXd cm = cc * minv;
    for (Eigen::Index b = 0; b < k; ++b) {
      const auto row = static_cast<Eigen::Index>(s_rows[static_cast<std::size_t>(b)]);
      for (Eigen::Index a = 0; a < k; ++a)
        binv_(static_cast<Eigen::Index>(s_pos[static_cast<std::size_t>(a)]), row) = minv(a, b);
      for (Eigen::Index c = 0; c < nl; ++c)
        binv_(static_cast<Eigen::Index>(logical_pos[l_rows[static_cast<std::size_t>(c)]]), row) = cm(c, b);
    }
  }
  for (std::size_t i : l_rows)
    binv_(static_cast<Eigen::Index>(logical_pos[i]), static_cast<Eigen::Index>(i)) = -1.0;
  weight_ = binv_.rowwise().squaredNorm();
  return true;
}

void LpEngine::recompute_primal() {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (pos_[j] == Pos::Basic) continue;
    x_[j] = nonbasic_value(j);
    if (x_[j] == 0.0) continue;
    if (j >= n_) {
      r[static_cast<Eigen::Index>(j - n_)] -= x_[j];
    } else {
      for (const auto& [i, v] : cols_[j]) r[static_cast<Eigen::Index>(i)] += v * x_[j];
    }
  }
  Eigen::VectorXd xb = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  for (Eigen::Index i = 0; i < r.size(); ++i)
    if (r[i] != 0.0) xb.noalias() -= r[i] * binv_.col(i);
  for (std::size_t p = 0; p < m_; ++p) x_[head_[p]] = xb[static_cast<Eigen::Index>(p)];
}

void LpEngine::recompute_duals() {
  Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
  for (std::size_t p = 0; p < m_; ++p) cb[static_cast<Eigen::Index>(p)] = cost_[head_[p]];
  const Eigen::VectorXd y = binv_.transpose() * cb;
  for (std::size_t j = 0; j < n_ + m_; ++j)
    d_[j] = pos_[j] == Pos::Basic ? 0.0 : cost_[j] - row_dot(y, j);
}

bool LpEngine::make_dual_feasible() {
  bool flipped = false;
  bool feasible = true;
  for (std::size_t j = 0; j < n_ + m_ && feasible; ++j) {
    if (pos_[j] == Pos::Basic || is_fixed(j)) continue;
    if (pos_[j] == Pos::Lower && d_[j] < -kDualTol) {
      feasible = std::isfinite(hi_[j]);
      if (feasible) pos_[j] = Pos::Upper;
    } else if (pos_[j] == Pos::Upper && d_[j] > kDualTol) {
      feasible = std::isfinite(lo_[j]);
      if (feasible) pos_[j] = Pos::Lower;
    } else if (pos_[j] == Pos::Free && std::abs(d_[j]) > kDualTol) {
      feasible = false;
      continue;
    } else {
      continue;
    }
    flipped = flipped || feasible;
  }
  if (flipped) recompute_primal();
  return feasible;
}

void LpEngine::pivot(std::size_t r, std::size_t q) {
  const auto rr = static_cast<Eigen::Index>(r);
  const double pivot_value = alpha_[rr];
  const Eigen::VectorXd row = binv_.row(rr);
  nz_.clear();
  for (Eigen::Index p = 0; p < alpha_.size(); ++p)
    if (alpha_[p] != 0.0 && p != rr) nz_.push_back(p);
  const bool sparse = nz_.size() * 4 < m_;
  // tau = B^-1 (B^-1)^T e_r restricted to the rows that change.
  tau_.setZero();
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    const double ri = row[i];
    if (ri == 0.0) continue;
    const double f = ri / pivot_value;
    double* col = binv_.col(i).data();
    if (sparse) {
      for (Eigen::Index p : nz_) {
        tau_[p] += col[p] * ri;
        col[p] -= f * alpha_[p];
      }
    } else {
      tau_.noalias() += ri * binv_.col(i);
      binv_.col(i).noalias() -= f * alpha_;
    }
    col[rr] = f;
  }
  // Dual steepest-edge weights are squared row norms of B^-1.
  const double wr = weight_[rr];
  for (Eigen::Index p : nz_) {
    const double ratio = alpha_[p] / pivot_value;
    weight_[p] = std::max(weight_[p] - 2.0 * ratio * tau_[p] + ratio * ratio * wr, 1e-12);
  }
  weight_[rr] = std::max(wr / (pivot_value * pivot_value), 1e-12);
  head_[r] = q;
  pos_[q] = Pos::Basic;
  d_[q] = 0.0;
  ++updates_;
  ++iterations_;
}

double LpEngine::primal_infeasibility() const {
  double worst = 0.0;
  for (std::size_t p = 0; p < m_; ++p) {
    const std::size_t h = head_[p];
    const double v = std::max(lo_[h] - x_[h], x_[h] - hi_[h]);
    worst = std::max(worst, v / (1.0 + std::max(std::abs(lo_[h]) < kInf ? std::abs(lo_[h]) : 0.0,
                                                 std::abs(hi_[h]) < kInf ? std::abs(hi_[h]) : 0.0)));
  }
  return worst;
}

double LpEngine::dual_infeasibility() const {
  double worst = 0.0;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (pos_[j] == Pos::Basic || is_fixed(j)) continue;
    if (pos_[j] == Pos::Lower) worst = std::max(worst, -d_[j]);
    else if (pos_[j] == Pos::Upper) worst = std::max(worst, d_[j]);
    else worst = std::max(worst, std::abs(d_[j]));
  }
  return worst;
}

LpEngine::Outcome LpEngine::primal() {
  const std::size_t max_iter = iterations_ + 50 * (n_ + m_) + 10000;
  bool duals_fresh = false;
  std::vector<double> d1(n_ + m_, 0.0);
  Eigen::VectorXd c1(static_cast<Eigen::Index>(m_));
  while (true) {
    if (iterations_ >= max_iter) return Outcome::IterationLimit;
    if (updates_ >= kRefactorEvery) {
      if (!refactor()) return Outcome::Singular;
      recompute_primal();
      duals_fresh = false;
    }
    bool infeasible = false;
    for (std::size_t p = 0; p < m_; ++p) {
      const std::size_t h = head_[p];
      double c = 0.0;
      if (x_[h] < lo_[h] - ptol(lo_[h])) c = -1.0;
      else if (x_[h] > hi_[h] + ptol(hi_[h])) c = 1.0;
      c1[static_cast<Eigen::Index>(p)] = c;
      infeasible = infeasible || c != 0.0;
    }
    const bool phase1 = infeasible;
    if (phase1) {
      const Eigen::VectorXd y1 = binv_.transpose() * c1;
      for (std::size_t j = 0; j < n_ + m_; ++j)
        d1[j] = pos_[j] == Pos::Basic ? 0.0 : -row_dot(y1, j);
      duals_fresh = false;
    } else if (!duals_fresh) {
      recompute_duals();
      duals_fresh = true;
    }
    const std::vector<double>& d = phase1 ? d1 : d_;
    const bool bland = degenerate_run_ > kDegenerateBeforeBland;

    // Pricing.
    std::size_t q = kNone;
    double best = 0.0;
    double dir = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (pos_[j] == Pos::Basic || is_fixed(j)) continue;
      double s = 0.0;
      if (pos_[j] == Pos::Lower && d[j] < -kDualTol) s = 1.0;
      else if (pos_[j] == Pos::Upper && d[j] > kDualTol) s = -1.0;
      else if (pos_[j] == Pos::Free && std::abs(d[j]) > kDualTol) s = d[j] < 0.0 ? 1.0 : -1.0;
      if (s == 0.0) continue;
      if (bland) {
        q = j;
        dir = s;
        break;
      }
      if (std::abs(d[j]) > best) {
        best = std::abs(d[j]);
        q = j;
        dir = s;
      }
    }
    if (q == kNone) return phase1 ? Outcome::Infeasible : Outcome::Optimal;

    ftran(q);

    // Ratio test (Harris two-pass; exact with lowest-index ties under Bland).
    struct Limit {
      std::size_t p;
      double ratio;
      double target;
    };
    std::vector<Limit> limits;
    double theta_max = kInf;
    for (std::size_t p = 0; p < m_; ++p) {
      const double a = alpha_[static_cast<Eigen::Index>(p)];
      if (std::abs(a) <= kPivotTol) continue;
      const std::size_t h = head_[p];
      const double rate = -dir * a;
      const double x = x_[h];
      const bool below = phase1 && x < lo_[h] - ptol(lo_[h]);
      const bool above = phase1 && x > hi_[h] + ptol(hi_[h]);
      double target;
      if (below) {
        if (rate <= 0.0) continue;
        target = lo_[h];
      } else if (above) {
        if (rate >= 0.0) continue;
        target = hi_[h];
      } else {
        target = rate < 0.0 ? lo_[h] : hi_[h];
        if (!std::isfinite(target)) continue;
      }
      const double ratio = (target - x) / rate;
      const double slack = ptol(target) / std::abs(rate);
      limits.push_back({p, ratio, target});
      theta_max = std::min(theta_max, ratio + slack);
    }
    const double range = hi_[q] - lo_[q];
    std::size_t r = kNone;
    double theta = kInf;
    double target = 0.0;
    if (bland) {
      for (const Limit& l : limits) {
        const double ratio = std::max(0.0, l.ratio);
        if (r == kNone || ratio < theta - 1e-12 ||
            (std::abs(ratio - theta) <= 1e-12 && head_[l.p] < head_[r])) {
          r = l.p;
          theta = ratio;
          target = l.target;
        }
      }
    } else {
      double best_alpha = 0.0;
      for (const Limit& l : limits) {
        if (l.ratio > theta_max) continue;
        const double a = std::abs(alpha_[static_cast<Eigen::Index>(l.p)]);
        if (a > best_alpha) {
          best_alpha = a;
          r = l.p;
          theta = std::max(0.0, l.ratio);
          target = l.target;
        }
      }
    }

    if (std::isfinite(range) && (r == kNone || range <= theta)) {
      // Entering variable reaches its opposite bound first.
      for (std::size_t p = 0; p < m_; ++p)
        x_[head_[p]] -= dir * range * alpha_[static_cast<Eigen::Index>(p)];
      pos_[q] = pos_[q] == Pos::Lower ? Pos::Upper : Pos::Lower;
      x_[q] = nonbasic_value(q);
      ++iterations_;
      degenerate_run_ = range > 1e-12 ? 0 : degenerate_run_ + 1;
      duals_fresh = duals_fresh && !phase1;
      continue;
    }
    if (r == kNone) return phase1 ? Outcome::Singular : Outcome::Unbounded;

    const std::size_t leaving = head_[r];
    if (!phase1) {
      const Eigen::VectorXd rho = binv_.row(static_cast<Eigen::Index>(r));
      const double ratio = d_[q] / alpha_[static_cast<Eigen::Index>(r)];
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (pos_[j] == Pos::Basic) continue;
        d_[j] -= ratio * row_dot(rho, j);
      }
      d_[leaving] = -ratio;
    }
    for (std::size_t p = 0; p < m_; ++p)
      x_[head_[p]] -= dir * theta * alpha_[static_cast<Eigen::Index>(p)];
    x_[q] += dir * theta;
    x_[leaving] = target;
    pos_[leaving] = target == lo_[leaving] ? Pos::Lower : Pos::Upper;
    pivot(r, q);
    degenerate_run_ = theta > 1e-12 ? 0 : degenerate_run_ + 1;
  }
}

LpEngine::Outcome LpEngine::dual() {
  const std::size_t max_iter = iterations_ + 50 * (n_ + m_) + 10000;
  Eigen::VectorXd rho(static_cast<Eigen::Index>(m_));
  std::vector<double> row_alpha(n_ + m_, 0.0);
  while (true) {
    if (iterations_ >= max_iter) return Outcome::IterationLimit;
    if (updates_ >= kRefactorEvery) {
      if (!refactor()) return Outcome::Singular;
      recompute_primal();
      recompute_duals();
      if (!make_dual_feasible()) return Outcome::NeedPrimal;
    }
    const bool bland = degenerate_run_ > kDegenerateBeforeBland;

    // Leaving row: dual steepest edge, largest violation^2 / ||e_p B^-1||^2.
    std::size_t r = kNone;
    double worst = 0.0;
    for (std::size_t p = 0; p < m_; ++p) {
      const std::size_t h = head_[p];
      double v = 0.0;
      if (x_[h] < lo_[h] - ptol(lo_[h])) v = lo_[h] - x_[h];
      else if (x_[h] > hi_[h] + ptol(hi_[h])) v = x_[h] - hi_[h];
      if (v == 0.0) continue;
      if (bland) {
        if (r == kNone || h < head_[r]) r = p;
        continue;
      }
      const double score = v * v / weight_[static_cast<Eigen::Index>(p)];
      if (score > worst) {
        worst = score;
        r = p;
      }
    }
    if (r == kNone) return Outcome::Optimal;

    const std::size_t leaving = head_[r];
    const bool to_lower = x_[leaving] < lo_[leaving];
    const double sgn = to_lower ? 1.0 : -1.0;
    const double target = to_lower ? lo_[leaving] : hi_[leaving];
    rho = binv_.row(static_cast<Eigen::Index>(r));

    double t_max = kInf;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      row_alpha[j] = 0.0;
      if (pos_[j] == Pos::Basic) continue;
      row_alpha[j] = row_dot(rho, j);
      if (is_fixed(j)) continue;
      const double a = sgn * row_alpha[j];
      if (std::abs(a) <= kPivotTol) continue;
      const bool candidate = (pos_[j] == Pos::Lower && a < 0.0) ||
                             (pos_[j] == Pos::Upper && a > 0.0) || pos_[j] == Pos::Free;
      if (candidate) t_max = std::min(t_max, (std::abs(d_[j]) + kDualTol) / std::abs(a));
    }
    std::size_t q = kNone;
    double t = 0.0;
    double best_a = 0.0;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (pos_[j] == Pos::Basic || is_fixed(j)) continue;
      const double a = sgn * row_alpha[j];
      if (std::abs(a) <= kPivotTol) continue;
      const bool candidate = (pos_[j] == Pos::Lower && a < 0.0) ||
                             (pos_[j] == Pos::Upper && a > 0.0) || pos_[j] == Pos::Free;
      if (!candidate) continue;
      const double ratio = std::abs(d_[j]) / std::abs(a);
      if (bland) {
        if (q == kNone || ratio < t - 1e-12) {
          q = j;
          t = ratio;
        }
        continue;
      }
      if (ratio <= t_max && std::abs(a) > best_a) {
        best_a = std::abs(a);
        q = j;
        t = ratio;
      }
    }
    if (q == kNone) return Outcome::Infeasible;

    ftran(q);
    const double pivot_value = alpha_[static_cast<Eigen::Index>(r)];
    if (std::abs(pivot_value - row_alpha[q]) > 1e-7 * (1.0 + std::abs(pivot_value))) {
      // Row and column disagree: the inverse has drifted.
      if (updates_ == 0) return Outcome::Singular;
      updates_ = kRefactorEvery;
      continue;
    }
    // Keep d_q exactly at zero and never step against the dual direction.
    if ((pos_[q] == Pos::Lower && d_[q] < 0.0) || (pos_[q] == Pos::Upper && d_[q] > 0.0)) t = 0.0;
    const double theta = sgn * t;
    for (std::size_t j = 0; j < n_ + m_; ++j)
      if (pos_[j] != Pos::Basic) d_[j] += theta * row_alpha[j];
    d_[leaving] = theta;

    const double delta = (x_[leaving] - target) / pivot_value;
    for (std::size_t p = 0; p < m_; ++p)
      x_[head_[p]] -= delta * alpha_[static_cast<Eigen::Index>(p)];
    x_[q] += delta;
    x_[leaving] = target;
    pos_[leaving] = to_lower ? Pos::Lower : Pos::Upper;
    pivot(r, q);
    degenerate_run_ = t > 1e-12 ? 0 : degenerate_run_ + 1;
  }
}

double LpEngine::row_residual() const {
  std::vector<double> act(m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j)
    for (const auto& [i, v] : cols_[j]) act[i] += v * x_[j];
  double worst = 0.0;
  for (std::size_t i = 0; i < m_; ++i)
    worst = std::max(worst, std::abs(act[i] - x_[n_ + i]) / (1.0 + std::abs(x_[n_ + i])));
  return worst;
}

LpStatus LpEngine::solve() {
  bool reset_once = false;
  bool force_refactor = false;
  for (int round = 0; round < 6; ++round) {
    if (force_refactor || updates_ >= kRefactorEvery / 2) {
      force_refactor = false;
      if (!refactor()) {
        if (reset_once) return LpStatus::Singular;
        reset_basis();
        reset_once = true;
      }
    }
    recompute_primal();
    recompute_duals();
    degenerate_run_ = 0;
    Outcome out = make_dual_feasible() ? dual() : Outcome::NeedPrimal;
    if (out == Outcome::NeedPrimal) out = primal();
    if (out == Outcome::Infeasible && primal_infeasibility() < 1e-6) {
      // A marginal infeasibility verdict is confirmed by a primal phase 1 pass.
      out = primal();
    }
    switch (out) {
      case Outcome::Optimal: break;
      case Outcome::Infeasible: return LpStatus::Infeasible;
      case Outcome::Unbounded: return LpStatus::Unbounded;
      case Outcome::IterationLimit: return LpStatus::IterationLimit;
      case Outcome::Singular:
        if (reset_once) return LpStatus::Singular;
        reset_basis();
        reset_once = true;
        continue;
      case Outcome::NeedPrimal: continue;
    }
    recompute_primal();
    recompute_duals();
    if (primal_infeasibility() <= kVerifyTol && dual_infeasibility() <= kVerifyTol &&
        row_residual() <= 1e-9)
      return LpStatus::Optimal;
    force_refactor = true;
  }
  return LpStatus::IterationLimit;
}

double LpEngine::objective() const {
  double obj = 0.0;
  for (std::size_t j = 0; j < n_; ++j)
    if (cost_[j] != 0.0) obj += cost_[j] * x_[j];
  return obj;
}

std::vector<double> LpEngine::values() const {
  return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)};
}

double LpEngine::dual_bound() const {
  double bound = 0.0;
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (pos_[j] == Pos::Basic) continue;
    const double d = d_[j];
    if (std::abs(d) < 1e-12) continue;
    const double b = d > 0.0 ? lo_[j] : hi_[j];
    if (!std::isfinite(b)) return -kInf;
    bound += d * b;
  }
  return bound;
}

}  // namespace rfcmpc::detail
