#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfcmpc/milp_solver.hpp"

namespace oracle {

using rfcmpc::Mode;
using rfcmpc::Sense;

double threshold_w_per_cell(double theta) { return 4.87e-4 * theta * theta - 9.46e-2 * theta + 46.34; }

double eta_el(double x, double theta) {
  double v = 0.74;
  if (x * 1000.0 > threshold_w_per_cell(theta)) v = 2.32e-4 * theta * x - 0.33 * x + 7.7e-4 * theta;
  return std::clamp(v, 1e-6, 1.0);
}

double eta_f(double x, double theta) {
  const double v = 8.06e-3 * theta * x - 8.89 * x + 1.85e-2 * theta - 9.29e-1 * x * x -
                   8.95e-6 * theta * theta - 8.88;
  return std::clamp(v, 1e-6, 1.0);
}

namespace {

constexpr double kFeasTol = 1e-9;

/// Solves the square system in place; false when (numerically) singular.
bool gauss(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double>& out) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-10) return false;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = rhs[i] / m[i][i];
  return true;
}

bool feasible(const SmallLp& lp, const std::vector<double>& y) {
  for (std::size_t j = 0; j < y.size(); ++j)
    if (y[j] < lp.lo[j] - kFeasTol || y[j] > lp.hi[j] + kFeasTol) return false;
  for (std::size_t i = 0; i < lp.b.size(); ++i) {
    double act = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) act += lp.a[i][j] * y[j];
    const double tol = kFeasTol * (1.0 + std::abs(lp.b[i]));
    switch (lp.sense[i]) {
      case Sense::LessEqual: if (act > lp.b[i] + tol) return false; break;
      case Sense::GreaterEqual: if (act < lp.b[i] - tol) return false; break;
      case Sense::Equal: if (std::abs(act - lp.b[i]) > tol) return false; break;
    }
  }
  return true;
}

}  // namespace

std::optional<double> vertex_min(const SmallLp& lp) {
  const std::size_t n = lp.c.size();
  if (n == 0) return feasible(lp, {}) ? std::optional<double>(0.0) : std::nullopt;
  // Candidate hyperplanes: every row and every finite bound.
  std::vector<std::vector<double>> planes;
  std::vector<double> level;
  for (std::size_t i = 0; i < lp.b.size(); ++i) {
    planes.push_back(lp.a[i]);
    level.push_back(lp.b[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    planes.push_back(e);
    level.push_back(lp.lo[j]);
    planes.push_back(e);
    level.push_back(lp.hi[j]);
  }
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  // Iterate over n-subsets in lexicographic order.
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    std::vector<std::vector<double>> m;
    std::vector<double> rhs;
    for (std::size_t i : pick) {
      m.push_back(planes[i]);
      rhs.push_back(level[i]);
    }
    std::vector<double> y;
    if (gauss(m, rhs, y) && feasible(lp, y)) {
      double obj = 0.0;
      for (std::size_t j = 0; j < n; ++j) obj += lp.c[j] * y[j];
      if (!best || obj < *best) best = obj;
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == planes.size() - n + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

std::optional<double> enumerate_milp(const rfcmpc::MilpModel& model) {
  const auto& vars = model.variables();
  std::vector<std::size_t> bin, cont;
  for (std::size_t j = 0; j < vars.size(); ++j)
    (vars[j].kind == rfcmpc::VarKind::Binary ? bin : cont).push_back(j);
  std::vector<std::size_t> where(vars.size());
  for (std::size_t k = 0; k < cont.size(); ++k) where[cont[k]] = k;

  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << bin.size()); ++mask) {
    std::vector<double> x(vars.size(), 0.0);
    bool in_bounds = true;
    for (std::size_t k = 0; k < bin.size(); ++k) {
      x[bin[k]] = static_cast<double>((mask >> k) & 1U);
      in_bounds = in_bounds && x[bin[k]] >= vars[bin[k]].lower && x[bin[k]] <= vars[bin[k]].upper;
    }
    if (!in_bounds) continue;
    SmallLp lp;
    double fixed_cost = 0.0;
    for (std::size_t j : bin) fixed_cost += model.objective()[j] * x[j];
    for (std::size_t j : cont) {
      lp.lo.push_back(vars[j].lower);
      lp.hi.push_back(vars[j].upper);
      lp.c.push_back(model.objective()[j]);
    }
    for (const auto& row : model.constraints()) {
      std::vector<double> a(cont.size(), 0.0);
      double rhs = row.rhs;
      for (const auto& t : row.terms) {
        if (vars[t.var].kind == rfcmpc::VarKind::Binary)
          rhs -= t.coef * x[t.var];
        else
          a[where[t.var]] += t.coef;
      }
      lp.a.push_back(a);
      lp.sense.push_back(row.sense);
      lp.b.push_back(rhs);
    }
    if (const auto v = vertex_min(lp); v && (!best || *v + fixed_cost < *best)) best = *v + fixed_cost;
  }
  return best;
}

rfcmpc::MilpModel random_milp(std::mt19937_64& rng, std::size_t binaries) {
  std::uniform_int_distribution<int> n_cont_dist(0, 2), rows_dist(1, 5), coef(-6, 6), sense_dist(0, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  rfcmpc::MilpModel m;
  const std::size_t n_cont = static_cast<std::size_t>(n_cont_dist(rng));
  std::vector<bool> is_binary(binaries, true);
  is_binary.resize(binaries + n_cont, false);
  std::shuffle(is_binary.begin(), is_binary.end(), rng);
  std::vector<double> x0;
  for (const bool b : is_binary) {
    if (b) {
      m.add_binary();
      x0.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
    } else {
      const double hi = 1.0 + std::floor(unit(rng) * 9.0);
      m.add_continuous(0.0, hi);
      x0.push_back(unit(rng) * hi);
    }
  }
  for (std::size_t j = 0; j < m.num_variables(); ++j)
    m.set_objective(j, std::round((unit(rng) * 20.0 - 10.0) * 4.0) / 4.0);
  const int rows = rows_dist(rng);
  for (int i = 0; i < rows; ++i) {
    std::vector<rfcmpc::LinearTerm> terms;
    double act = 0.0;
    for (std::size_t j = 0; j < m.num_variables(); ++j) {
      if (unit(rng) < 0.35) continue;
      const double c = coef(rng);
      terms.push_back({j, c});
      act += c * x0[j];
    }
    if (terms.empty()) continue;
    // Rows are mostly satisfied by x0, occasionally tightened past it.
    const int s = sense_dist(rng);
    const double slack = std::floor(unit(rng) * 4.0) - (unit(rng) < 0.15 ? 3.0 : 0.0);
    if (s == 0) m.add_constraint(terms, Sense::Equal, std::round(act * 2.0) / 2.0);
    else if (s <= 3) m.add_constraint(terms, Sense::LessEqual, std::floor(act) + slack);
    else m.add_constraint(terms, Sense::GreaterEqual, std::ceil(act) - slack);
  }
  return m;
}

rfcmpc::StageData random_stage(std::mt19937_64& rng, std::size_t T, std::size_t S, std::size_t L) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  rfcmpc::StageData d;
  rfcmpc::PlantParams& p = d.params;
  p.e_h = 20.0 + unit(rng) * 380.0;
  p.max_switches = 1 + static_cast<int>(unit(rng) * 3.0);
  p.switch_window = 2 + static_cast<int>(unit(rng) * 5.0);
  d.state.soh = unit(rng) < 0.2 ? (unit(rng) < 0.5 ? 0.0 : 1.0) : unit(rng);
  d.state.mode = rfcmpc::kAllModes[static_cast<std::size_t>(unit(rng) * 4.0) % 4];
  int tel = 0;
  int tf = 0;
  for (int i = 0; i + 1 < p.switch_window; ++i) {
    Mode m = unit(rng) < 0.5 ? Mode::Soec : Mode::Sofc;
    if (unit(rng) < 0.3 && tel < p.max_switches) {
      m = Mode::TSoec;
      ++tel;
    } else if (unit(rng) < 0.3 && tf < p.max_switches) {
      m = Mode::TSofc;
      ++tf;
    }
    d.state.switch_history.push_back(m);
  }
  std::vector<double> weight;
  for (std::size_t s = 0; s < S; ++s) {
    rfcmpc::JointPath path;
    for (std::size_t k = 0; k < T; ++k) {
      path.load.push_back(unit(rng) * 200.0);
      path.res.push_back(unit(rng) < 0.25 ? 0.0 : unit(rng) * 250.0);
    }
    d.scenarios.scenarios.push_back(path);
    weight.push_back(0.1 + unit(rng));
  }
  double sum = 0.0;
  for (double w : weight) sum += w;
  double assigned = 0.0;
  for (std::size_t s = 0; s + 1 < S; ++s) {
    d.scenarios.probabilities.push_back(weight[s] / sum);
    assigned += weight[s] / sum;
  }
  d.scenarios.probabilities.push_back(1.0 - assigned);
  for (std::size_t k = 0; k < T; ++k) d.prices.push_back(unit(rng) * 0.15);
  d.el_table = rfcmpc::breakpoint_table(rfcmpc::Curve::El, L, p, rfcmpc::BreakpointLayout::Uniform);
  d.f_table = rfcmpc::breakpoint_table(rfcmpc::Curve::F, L, p, rfcmpc::BreakpointLayout::Uniform);
  d.omega_plus = 0.2 + unit(rng) * 1.5;
  d.omega_minus = 0.2 + unit(rng) * 1.5;
  return d;
}

namespace {

bool may_follow(Mode prev, Mode next) {
  switch (prev) {
    case Mode::Soec: return next == Mode::Soec || next == Mode::TSofc;
    case Mode::Sofc: return next == Mode::Sofc || next == Mode::TSoec;
    case Mode::TSoec: return next == Mode::Soec;
    case Mode::TSofc: return next == Mode::Sofc;
  }
  return false;
}

bool within_switch_limit(const rfcmpc::StageData& d, const std::vector<Mode>& seq) {
  std::vector<Mode> line(d.state.switch_history.begin(), d.state.switch_history.end());
  const long offset = static_cast<long>(line.size());
  line.insert(line.end(), seq.begin(), seq.end());
  const long window = d.params.switch_window;
  const long T = static_cast<long>(seq.size());
  for (long start = -(window - 1); start <= T - window; ++start) {
    int tel = 0;
    int tf = 0;
    for (long j = start; j < start + window; ++j) {
      const long at = j + offset;
      if (at < 0) continue;
      tel += line[static_cast<std::size_t>(at)] == Mode::TSoec;
      tf += line[static_cast<std::size_t>(at)] == Mode::TSofc;
    }
    if (tel > d.params.max_switches || tf > d.params.max_switches) return false;
  }
  return true;
}

/// Hydrogen flow as an affine function of power on [lo, hi].
struct Affine {
  double lo, hi, at_lo, slope;
};

double flow(bool electrolysis, double power, const rfcmpc::PlantParams& p) {
  const double x = power / p.n_cells;
  return electrolysis ? eta_el(x, p.theta) * power : power / eta_f(x, p.theta);
}

/// Affine pieces of a table over the operating range. A repeated abscissa
/// marks the SOEC jump; the piece starting there takes the upper branch.
std::vector<Affine> pieces(bool electrolysis, const rfcmpc::BreakpointTable& t, const rfcmpc::PlantParams& p) {
  std::vector<Affine> out;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double a = t.power[i], b = t.power[i + 1];
    if (b <= a) continue;
    double fa = flow(electrolysis, a, p);
    if (t.power[i - 1] == a) {
      const double x = a / p.n_cells;
      fa = std::clamp(2.32e-4 * p.theta * x - 0.33 * x + 7.7e-4 * p.theta, 1e-6, 1.0) * a;
    }
    out.push_back({a, b, fa, (flow(electrolysis, b, p) - fa) / (b - a)});
  }
  return out;
}

std::optional<double> sequence_lp(const rfcmpc::StageData& d, const std::vector<Mode>& seq,
                                  const std::vector<Affine>& piece) {
  const rfcmpc::PlantParams& p = d.params;
  const double inf = std::numeric_limits<double>::infinity();
  const double gain = p.delta_t / p.e_h;
  rfcmpc::MilpModel m;
  std::size_t prev_h = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Mode mode = seq[k];
    const Affine& g = piece[k];
    const bool el = mode == Mode::Soec, fc = mode == Mode::Sofc;
    const std::size_t pe = m.add_continuous(0.0, p.p_e_max);
    const std::size_t pac = m.add_continuous(0.0, p.p_e_max);
    const std::size_t gam = m.add_continuous(0.0, inf);
    const std::size_t pel = el ? m.add_continuous(g.lo, g.hi) : m.add_continuous(0.0, 0.0);
    const std::size_t pf = fc ? m.add_continuous(g.lo, g.hi) : m.add_continuous(0.0, 0.0);
    const std::size_t h = m.add_continuous(p.h_min, p.h_max);
    m.set_objective(pac, -p.delta_t * (p.c_m + p.c_r));
    m.set_objective(pe, -p.delta_t * d.prices[k]);
    // h - h_prev - gain*(phi_el - phi_f) = 0 with phi affine in power.
    double rhs = k == 0 ? d.state.soh : 0.0;
    std::vector<rfcmpc::LinearTerm> tank{{h, 1.0}};
    if (k > 0) tank.push_back({prev_h, -1.0});
    if (el) {
      tank.push_back({pel, -gain * g.slope});
      rhs += gain * (g.at_lo - g.slope * g.lo);
    }
    if (fc) {
      tank.push_back({pf, gain * g.slope});
      rhs -= gain * (g.at_lo - g.slope * g.lo);
    }
    m.add_constraint(tank, Sense::Equal, rhs);
    m.add_constraint({{pac, 1.0}, {pe, -1.0}}, Sense::LessEqual, 0.0);
    const double fixed = mode == Mode::TSoec ? p.p_tilde_el : (mode == Mode::TSofc ? p.p_tilde_f : 0.0);
    for (std::size_t s = 0; s < d.scenarios.size(); ++s) {
      const double pi = d.scenarios.probabilities[s];
      const std::size_t xp = m.add_continuous(0.0, inf), xm = m.add_continuous(0.0, inf);
      const std::size_t cp = m.add_continuous(0.0, inf), cm = m.add_continuous(0.0, inf);
      m.set_objective(xp, pi * d.omega_plus);
      m.set_objective(cp, pi * d.omega_plus);
      m.set_objective(xm, pi * d.omega_minus);
      m.set_objective(cm, pi * d.omega_minus);
      m.add_constraint({{pac, 1.0}, {gam, 1.0}, {xp, -1.0}, {xm, 1.0}}, Sense::Equal,
                       d.scenarios.scenarios[s].load[k]);
      m.add_constraint({{pel, 1.0}, {pf, -1.0}, {pe, 1.0}, {cp, -1.0}, {cm, 1.0}}, Sense::Equal,
                       d.scenarios.scenarios[s].res[k] - fixed);
    }
    prev_h = h;
  }
  const rfcmpc::Solution sol = rfcmpc::solve_lp(m);
  if (sol.status != rfcmpc::SolveStatus::Optimal) return std::nullopt;
  return sol.objective;
}

}  // namespace

SequenceOracle enumerate_modes(const rfcmpc::StageData& d) {
  SequenceOracle out;
  const std::size_t T = d.horizon();
  const auto el_pieces = pieces(true, d.el_table, d.params);
  const auto f_pieces = pieces(false, d.f_table, d.params);
  std::vector<Mode> seq(T);
  std::size_t combos = 1;
  for (std::size_t k = 0; k < T; ++k) combos *= 4;
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < T; ++k, c /= 4) seq[k] = rfcmpc::kAllModes[c % 4];
    bool legal = may_follow(d.state.mode, seq[0]);
    for (std::size_t k = 1; legal && k < T; ++k) legal = may_follow(seq[k - 1], seq[k]);
    if (!legal || !within_switch_limit(d, seq)) continue;
    ++out.sequences;
    // Every choice of conversion piece for the active steps.
    std::vector<std::size_t> choice(T, 0);
    while (true) {
      std::vector<Affine> piece(T, Affine{0.0, 0.0, 0.0, 0.0});
      for (std::size_t k = 0; k < T; ++k) {
        if (seq[k] == Mode::Soec) piece[k] = el_pieces[choice[k]];
        if (seq[k] == Mode::Sofc) piece[k] = f_pieces[choice[k]];
      }
      if (const auto v = sequence_lp(d, seq, piece); v && (!out.objective || *v < *out.objective))
        out.objective = v;
      std::size_t k = 0;
      for (; k < T; ++k) {
        const std::size_t n = seq[k] == Mode::Soec ? el_pieces.size() : (seq[k] == Mode::Sofc ? f_pieces.size() : 1);
        if (++choice[k] < n) break;
        choice[k] = 0;
      }
      if (k == T) break;
    }
  }
  return out;
}

}  // namespace oracle
