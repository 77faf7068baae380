#include "rfcmpc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rfcmpc/errors.hpp"

namespace rfcmpc {

namespace {

double hour_of_day(Timestamp t) { return static_cast<double>(((t % 86400) + 86400) % 86400) / 3600.0; }

// 1970-01-01 was a Thursday; 0 = Monday.
int weekday(Timestamp t) {
  const Timestamp days = t >= 0 ? t / 86400 : (t - 86399) / 86400;
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

}  // namespace

PowerSeries synthetic_power(const SyntheticSite& site, Timestamp start, std::size_t steps, std::uint64_t seed) {
  if (start % kStepSeconds != 0) throw InputError("synthetic_power: start is off the 15-minute grid");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> clear(site.min_clearness, 1.0);
  PowerSeries s;
  Timestamp day = -1;
  double clearness = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    const Timestamp t = start + static_cast<Timestamp>(i) * kStepSeconds;
    if (t / 86400 != day) {
      day = t / 86400;
      clearness = clear(rng);
    }
    const double h = hour_of_day(t) + 0.125;  // interval midpoint
    double pv = 0.0;
    if (h > site.sunrise_h && h < site.sunset_h) {
      const double shape = std::sin(std::numbers::pi * (h - site.sunrise_h) / (site.sunset_h - site.sunrise_h));
      pv = site.pv_peak_kw * clearness * shape * (1.0 + site.pv_noise * noise(rng));
    }
    const bool weekend = weekday(t) >= 5;
    const bool working = !weekend && h >= 7.0 && h < 19.0;
    const double level = weekend ? site.load_weekend_kw : (working ? site.load_work_kw : site.load_base_kw);
    const double load = level * (1.0 + site.load_noise * noise(rng));
    // Round to watts so the CSV stays short.
    s.push_back(t, std::round(std::max(0.0, load) * 1000.0) / 1000.0, std::round(std::max(0.0, pv) * 1000.0) / 1000.0);
  }
  return s;
}

PriceSeries synthetic_prices(const SyntheticSite& site, Timestamp start, std::size_t steps) {
  if (start % kStepSeconds != 0) throw InputError("synthetic_prices: start is off the 15-minute grid");
  PriceSeries s;
  const double mid = 0.5 * (site.price_min + site.price_max);
  const double amp = 0.5 * (site.price_max - site.price_min);
  for (std::size_t i = 0; i < steps; ++i) {
    const Timestamp t = start + static_cast<Timestamp>(i) * kStepSeconds;
    const double h = hour_of_day(t);
    const double c = mid + amp * std::sin(2.0 * std::numbers::pi * (h - 13.0) / 24.0);
    s.time.push_back(t);
    s.price.push_back(std::round(c * 1e5) / 1e5);
  }
  return s;
}

}  // namespace rfcmpc
