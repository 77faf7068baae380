#pragma once

#include <cstddef>
#include <cstdint>

#include "rfcmpc/timeseries.hpp"

namespace rfcmpc {

/// Seeded stand-in for a PV-equipped industrial site.
struct SyntheticSite {
  double pv_peak_kw = 150.0;       // clear-sky noon output
  double sunrise_h = 6.0;          // PV is a half sine between sunrise and sunset
  double sunset_h = 18.0;
  double min_clearness = 0.6;      // daily clearness drawn in [min, 1]
  double load_work_kw = 163.0;     // weekday 07:00-19:00
  double load_base_kw = 60.0;      // weekday nights
  double load_weekend_kw = 50.0;
  double load_noise = 0.05;        // relative standard deviation
  double pv_noise = 0.05;
  double price_min = 0.03;  // EUR/kWh, at 07:00
  double price_max = 0.12;  // EUR/kWh, at 19:00
};

/// `steps` quarter-hours from `start` (must lie on the grid).
PowerSeries synthetic_power(const SyntheticSite& site, Timestamp start, std::size_t steps, std::uint64_t seed);

/// Noise-free repeating daily price shape.
PriceSeries synthetic_prices(const SyntheticSite& site, Timestamp start, std::size_t steps);

}  // namespace rfcmpc
