#include "fixtures.hpp"

#include <fstream>
#include <sstream>

namespace fixtures {

std::filesystem::path source_dir() { return RFCMPC_SOURCE_DIR; }

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rfcmpc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

rfcmpc::Timestamp monday() { return rfcmpc::parse_timestamp("2024-05-06T00:00:00Z"); }

rfcmpc::PowerSeries flat_series(rfcmpc::Timestamp start, std::size_t steps, double load, double res) {
  rfcmpc::PowerSeries s;
  for (std::size_t i = 0; i < steps; ++i)
    s.push_back(start + static_cast<rfcmpc::Timestamp>(i) * rfcmpc::kStepSeconds, load, res);
  return s;
}

rfcmpc::PriceSeries flat_prices(rfcmpc::Timestamp start, std::size_t steps, double price) {
  rfcmpc::PriceSeries p;
  for (std::size_t i = 0; i < steps; ++i) {
    p.time.push_back(start + static_cast<rfcmpc::Timestamp>(i) * rfcmpc::kStepSeconds);
    p.price.push_back(price);
  }
  return p;
}

}  // namespace fixtures
