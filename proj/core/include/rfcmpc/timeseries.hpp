#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfcmpc/forecaster.hpp"

namespace rfcmpc {

/// Seconds since 1970-01-01T00:00:00Z.
using Timestamp = std::int64_t;
inline constexpr Timestamp kStepSeconds = 900;

/// Parses `YYYY-MM-DDTHH:MM:SSZ`; throws InputError otherwise.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Load and RES on a gap-free 15-minute grid.
struct PowerSeries {
  std::vector<Timestamp> time;
  std::vector<double> load;  // kW
  std::vector<double> res;   // kW

  std::size_t size() const { return time.size(); }
  Observation at(std::size_t i) const { return {load[i], res[i]}; }
  std::vector<Observation> observations() const;
  std::optional<std::size_t> index_of(Timestamp t) const;
  void push_back(Timestamp t, double load_kw, double res_kw);
};

struct PriceSeries {
  std::vector<Timestamp> time;
  std::vector<double> price;  // EUR/kWh

  std::size_t size() const { return time.size(); }
  std::optional<std::size_t> index_of(Timestamp t) const;
};

/// `timestamp,load_kw,pv_kw`. Gaps, duplicates, off-grid timestamps, negative
/// or non-finite powers are errors reported with `source` and line number.
PowerSeries read_power_csv(std::istream& in, std::string_view source);
PowerSeries read_power_csv(const std::filesystem::path& path);
void write_power_csv(const PowerSeries& series, std::ostream& out);

/// `timestamp,c_e_eur_per_kwh` on the same grid rules.
PriceSeries read_price_csv(std::istream& in, std::string_view source);
PriceSeries read_price_csv(const std::filesystem::path& path);
void write_price_csv(const PriceSeries& series, std::ostream& out);

}  // namespace rfcmpc
