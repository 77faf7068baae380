#pragma once

#include <string>
#include <string_view>

namespace rfcmpc {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_exact(double value);

/// Strict full-string parse; throws InputError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace rfcmpc
