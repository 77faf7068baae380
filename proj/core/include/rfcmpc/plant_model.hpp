#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>

namespace rfcmpc {

/// Reversible fuel cell, hydrogen tank, grid connection and tariff constants.
///
/// Powers are in kW, energies in kWh, tariffs in EUR/kWh. Defaults describe the
/// 100-cell solid-oxide unit of the warehouse community study case.
struct PlantParams {
  double p_e_max = 340.0;  // grid export limit
  double p_el_min = 7.2;   // SOEC operating range
  double p_el_max = 160.0;
  double p_f_min = 3.5;  // SOFC operating range
  double p_f_max = 40.0;
  double p_tilde_el = 2.6;  // demand while in T_SOEC
  double p_tilde_f = 1.3;   // demand while in T_SOFC
  double e_h = 400.0;       // tank capacity, kWh of hydrogen (LHV)
  double h_min = 0.0;
  double h_max = 1.0;
  int n_cells = 100;
  double theta = 1123.0;  // stack temperature, K
  double delta_t = 0.25;  // hours per step
  int max_switches = 3;   // per transition kind, inside one switch window
  int switch_window = 16;
  double c_m = 0.11;   // self-consumption incentive
  double c_r = 0.009;  // restitution of grid charges

  // SOEC efficiency: constant below the temperature-dependent threshold
  // alpha1*T^2 - alpha2*T + alpha3 [W/cell], linear in kW/cell above it.
  double alpha1 = 4.87e-4;
  double alpha2 = 9.46e-2;
  double alpha3 = 46.34;
  double beta1 = 2.32e-4;
  double beta2 = 0.33;
  double beta3 = 7.7e-4;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

enum class Mode { Soec, Sofc, TSoec, TSofc };

inline constexpr Mode kAllModes[] = {Mode::Soec, Mode::Sofc, Mode::TSoec, Mode::TSofc};

std::string_view to_string(Mode mode);
/// Accepts SOEC, SOFC, T_SOEC, T_SOFC (case-sensitive).
std::optional<Mode> parse_mode(std::string_view text);

bool is_transition(Mode mode);

struct PlantState {
  double soh = 0.5;
  Mode mode = Mode::Soec;
  /// Modes applied during the most recent steps, oldest first. Holds at most
  /// switch_window - 1 entries; the rolling switch limit counts these.
  std::deque<Mode> switch_history;

  /// Append the mode just applied and trim to switch_window - 1 entries.
  void record(Mode applied, const PlantParams& params);

  bool operator==(const PlantState&) const = default;
};

/// SOEC threshold in W per cell at stack temperature `theta`.
double soec_threshold_w_per_cell(double theta, const PlantParams& params);

/// SOEC efficiency for a per-cell electric input in kW. Clamped to [1e-6, 1].
double eta_el(double p_el_per_cell_kw, double theta, const PlantParams& params);

/// SOFC efficiency for a per-cell electric output in kW. Clamped to [1e-6, 1].
double eta_f(double p_f_per_cell_kw, double theta, const PlantParams& params);

/// Hydrogen power (kW, LHV) produced by the SOEC at electric input `p_el`.
/// `p_el` must be 0 or within [p_el_min, p_el_max].
double g_el(double p_el, const PlantParams& params);

/// Hydrogen power (kW, LHV) consumed by the SOFC at electric output `p_f`.
double g_f(double p_f, const PlantParams& params);

/// One-step tank update. No clamping: bounds are a caller constraint.
double soh_step(double h, double phi_el, double phi_f, const PlantParams& params);

/// Signed RFC exchange: positive when absorbing, negative when generating.
/// Throws std::domain_error when the powers do not match the mode.
double rfc_power(Mode mode, double p_el, double p_f, const PlantParams& params);

bool legal_transition(Mode prev, Mode next);

/// Manager income over one step in EUR.
double income_step(double p_ac, double p_e, double c_e, const PlantParams& params);

/// Hydrogen mass for a kWh amount (1 MWh = 30 kg).
constexpr double hydrogen_kg(double kwh) { return kwh * 0.03; }

}  // namespace rfcmpc
