#include "rfcmpc/numfmt.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include <fmt/core.h>

#include "rfcmpc/errors.hpp"

namespace rfcmpc {

std::string format_exact(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_exact: to_chars failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty())
    throw InputError(fmt::format("{}: cannot parse '{}' as a number", what, text));
  return value;
}

long long parse_int(std::string_view text, std::string_view what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw InputError(fmt::format("{}: cannot parse '{}' as an integer", what, text));
  return value;
}

}  // namespace rfcmpc
