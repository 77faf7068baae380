#include "rfcmpc/timeseries.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"
#include "rfcmpc/numfmt.hpp"

namespace rfcmpc {

namespace {

using namespace std::chrono;

int digits(std::string_view text, std::size_t pos, std::size_t n) {
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (text[i] < '0' || text[i] > '9') return -1;
    v = v * 10 + (text[i] - '0');
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class Row>
void read_grid_csv(std::istream& in, std::string_view source, std::string_view header,
                   std::size_t n_fields, std::vector<Timestamp>& times, Row&& row) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    return InputError(fmt::format("{} line {}: {}", source, line_no, what));
  };
  if (!std::getline(in, line)) throw InputError(fmt::format("{}: empty file", source));
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw fail(fmt::format("expected header '{}'", header));
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw fail("empty line");
    const auto fields = split(line);
    if (fields.size() != n_fields)
      throw fail(fmt::format("expected {} fields, got {}", n_fields, fields.size()));
    Timestamp t = 0;
    try {
      t = parse_timestamp(fields[0]);
    } catch (const InputError& e) {
      throw fail(e.what());
    }
    if (t % kStepSeconds != 0) throw fail(fmt::format("timestamp {} is off the 15-minute grid", fields[0]));
    if (!times.empty() && t != times.back() + kStepSeconds)
      throw fail(fmt::format("timestamp {} does not follow {} by 15 minutes", fields[0],
                             format_timestamp(times.back())));
    try {
      row(fields);
    } catch (const InputError& e) {
      throw fail(e.what());
    }
    times.push_back(t);
  }
  if (times.empty()) throw InputError(fmt::format("{}: no data rows", source));
}

std::optional<std::size_t> grid_index(const std::vector<Timestamp>& time, Timestamp t) {
  if (time.empty() || t < time.front() || t > time.back() || (t - time.front()) % kStepSeconds != 0)
    return std::nullopt;
  return static_cast<std::size_t>((t - time.front()) / kStepSeconds);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return in;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':' || text[19] != 'Z')
    throw InputError(fmt::format("timestamp '{}' is not YYYY-MM-DDTHH:MM:SSZ", text));
  const int y = digits(text, 0, 4), mo = digits(text, 5, 2), d = digits(text, 8, 2);
  const int hh = digits(text, 11, 2), mm = digits(text, 14, 2), ss = digits(text, 17, 2);
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (y < 0 || mo < 0 || d < 0 || hh < 0 || mm < 0 || ss < 0 || !ymd.ok() || hh > 23 || mm > 59 || ss > 59)
    throw InputError(fmt::format("timestamp '{}' is not a valid UTC time", text));
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_timestamp(Timestamp t) {
  Timestamp days = t / 86400;
  Timestamp rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), rem / 3600,
                     (rem / 60) % 60, rem % 60);
}

std::vector<Observation> PowerSeries::observations() const {
  std::vector<Observation> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i));
  return out;
}

std::optional<std::size_t> PowerSeries::index_of(Timestamp t) const { return grid_index(time, t); }
std::optional<std::size_t> PriceSeries::index_of(Timestamp t) const { return grid_index(time, t); }

void PowerSeries::push_back(Timestamp t, double load_kw, double res_kw) {
  time.push_back(t);
  load.push_back(load_kw);
  res.push_back(res_kw);
}

PowerSeries read_power_csv(std::istream& in, std::string_view source) {
  PowerSeries s;
  read_grid_csv(in, source, "timestamp,load_kw,pv_kw", 3, s.time, [&](const auto& f) {
    const double load = parse_double(f[1], "load_kw");
    const double pv = parse_double(f[2], "pv_kw");
    if (!std::isfinite(load) || load < 0.0) throw InputError(fmt::format("load_kw {} must be >= 0", f[1]));
    if (!std::isfinite(pv) || pv < 0.0) throw InputError(fmt::format("pv_kw {} must be >= 0", f[2]));
    s.load.push_back(load);
    s.res.push_back(pv);
  });
  return s;
}

PowerSeries read_power_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_power_csv(in, path.string());
}

void write_power_csv(const PowerSeries& series, std::ostream& out) {
  out << "timestamp,load_kw,pv_kw\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(series.time[i]) << ',' << format_exact(series.load[i]) << ','
        << format_exact(series.res[i]) << '\n';
}

PriceSeries read_price_csv(std::istream& in, std::string_view source) {
  PriceSeries s;
  read_grid_csv(in, source, "timestamp,c_e_eur_per_kwh", 2, s.time, [&](const auto& f) {
    const double c = parse_double(f[1], "c_e_eur_per_kwh");
    if (!std::isfinite(c)) throw InputError("price must be finite");
    s.price.push_back(c);
  });
  return s;
}

PriceSeries read_price_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_price_csv(in, path.string());
}

void write_price_csv(const PriceSeries& series, std::ostream& out) {
  out << "timestamp,c_e_eur_per_kwh\n";
  for (std::size_t i = 0; i < series.size(); ++i)
    out << format_timestamp(series.time[i]) << ',' << format_exact(series.price[i]) << '\n';
}

}  // namespace rfcmpc
