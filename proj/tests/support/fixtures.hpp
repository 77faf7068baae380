#pragma once

#include <filesystem>
#include <string>

#include "rfcmpc/timeseries.hpp"

namespace fixtures {

std::filesystem::path source_dir();
/// Empty scratch directory unique to `name`, recreated on every call.
std::filesystem::path fresh_dir(const std::string& name);
std::string read_file(const std::filesystem::path& path);

rfcmpc::Timestamp monday();  // 2024-05-06T00:00:00Z
rfcmpc::PowerSeries flat_series(rfcmpc::Timestamp start, std::size_t steps, double load, double res);
rfcmpc::PriceSeries flat_prices(rfcmpc::Timestamp start, std::size_t steps, double price);

}  // namespace fixtures
