#include "rfcmpc/plant_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/core.h>

namespace rfcmpc {

namespace {

constexpr double kEtaFloor = 1e-6;
constexpr double kSoecLowBranch = 0.74;
// Relative slack when checking that a power lies inside its operating range.
constexpr double kRangeSlack = 1e-9;

double clamp_eta(double eta) { return std::clamp(eta, kEtaFloor, 1.0); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(fmt::format("PlantParams: {}", what));
}

bool in_range(double p, double lo, double hi) {
  const double slack = kRangeSlack * std::max(1.0, hi);
  return p >= lo - slack && p <= hi + slack;
}

}  // namespace

void PlantParams::validate() const {
  require(std::isfinite(p_e_max) && p_e_max >= 0.0, "p_e_max must be >= 0");
  require(p_el_min > 0.0 && p_el_min < p_el_max, "need 0 < p_el_min < p_el_max");
  require(p_f_min > 0.0 && p_f_min < p_f_max, "need 0 < p_f_min < p_f_max");
  require(p_tilde_el >= 0.0 && p_tilde_f >= 0.0, "transition demands must be >= 0");
  require(e_h > 0.0, "e_h must be > 0");
  require(h_min >= 0.0 && h_min < h_max, "need 0 <= h_min < h_max");
  require(n_cells >= 1, "n_cells must be >= 1");
  require(theta > 0.0, "theta must be > 0");
  require(delta_t > 0.0, "delta_t must be > 0");
  require(c_m >= 0.0 && c_r >= 0.0, "tariffs must be >= 0");
  require(max_switches >= 1, "max_switches must be >= 1");
  require(switch_window >= 1, "switch_window must be >= 1");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Soec: return "SOEC";
    case Mode::Sofc: return "SOFC";
    case Mode::TSoec: return "T_SOEC";
    case Mode::TSofc: return "T_SOFC";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : kAllModes)
    if (to_string(m) == text) return m;
  return std::nullopt;
}

bool is_transition(Mode mode) { return mode == Mode::TSoec || mode == Mode::TSofc; }

void PlantState::record(Mode applied, const PlantParams& params) {
  switch_history.push_back(applied);
  const auto keep = static_cast<std::size_t>(std::max(0, params.switch_window - 1));
  while (switch_history.size() > keep) switch_history.pop_front();
  mode = applied;
}

double soec_threshold_w_per_cell(double theta, const PlantParams& params) {
  return params.alpha1 * theta * theta - params.alpha2 * theta + params.alpha3;
}

double eta_el(double p_el_per_cell_kw, double theta, const PlantParams& params) {
  if (!(p_el_per_cell_kw >= 0.0))
    throw std::domain_error(fmt::format("eta_el: negative power {}", p_el_per_cell_kw));
  const double x = p_el_per_cell_kw;
  if (x * 1000.0 <= soec_threshold_w_per_cell(theta, params)) return kSoecLowBranch;
  return clamp_eta(params.beta1 * theta * x - params.beta2 * x + params.beta3 * theta);
}

double eta_f(double p_f_per_cell_kw, double theta, const PlantParams& /*params*/) {
  if (!(p_f_per_cell_kw >= 0.0))
    throw std::domain_error(fmt::format("eta_f: negative power {}", p_f_per_cell_kw));
  const double x = p_f_per_cell_kw;
  const double eta = 8.06e-3 * theta * x - 8.89 * x + 1.85e-2 * theta - 9.29e-1 * x * x -
                     8.95e-6 * theta * theta - 8.88;
  return clamp_eta(eta);
}

double g_el(double p_el, const PlantParams& params) {
  if (p_el == 0.0) return 0.0;
  if (!in_range(p_el, params.p_el_min, params.p_el_max))
    throw std::domain_error(fmt::format("g_el: {} kW outside {{0}} U [{}, {}]", p_el,
                                        params.p_el_min, params.p_el_max));
  return eta_el(p_el / params.n_cells, params.theta, params) * p_el;
}

double g_f(double p_f, const PlantParams& params) {
  if (p_f == 0.0) return 0.0;
  if (!in_range(p_f, params.p_f_min, params.p_f_max))
    throw std::domain_error(fmt::format("g_f: {} kW outside {{0}} U [{}, {}]", p_f,
                                        params.p_f_min, params.p_f_max));
  return p_f / eta_f(p_f / params.n_cells, params.theta, params);
}

double soh_step(double h, double phi_el, double phi_f, const PlantParams& params) {
  return h + (params.delta_t / params.e_h) * (phi_el - phi_f);
}

double rfc_power(Mode mode, double p_el, double p_f, const PlantParams& params) {
  const auto mismatch = [&] {
    return std::domain_error(fmt::format("rfc_power: p_el={} p_f={} inconsistent with mode {}",
                                         p_el, p_f, to_string(mode)));
  };
  switch (mode) {
    case Mode::Soec:
      if (p_f != 0.0) throw mismatch();
      return p_el;
    case Mode::Sofc:
      if (p_el != 0.0) throw mismatch();
      return -p_f;
    case Mode::TSoec:
      if (p_el != 0.0 || p_f != 0.0) throw mismatch();
      return params.p_tilde_el;
    case Mode::TSofc:
      if (p_el != 0.0 || p_f != 0.0) throw mismatch();
      return params.p_tilde_f;
  }
  throw mismatch();
}

bool legal_transition(Mode prev, Mode next) {
  switch (prev) {
    case Mode::Soec: return next != Mode::Sofc && next != Mode::TSoec;
    case Mode::Sofc: return next != Mode::Soec && next != Mode::TSofc;
    case Mode::TSoec: return next == Mode::Soec;
    case Mode::TSofc: return next == Mode::Sofc;
  }
  return false;
}

double income_step(double p_ac, double p_e, double c_e, const PlantParams& params) {
  return params.delta_t * ((params.c_m + params.c_r) * p_ac + c_e * p_e);
}

}  // namespace rfcmpc
