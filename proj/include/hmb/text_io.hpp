// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hmb {

/// Shortest round-trippable rendering (17 significant digits, "inf" for infinity).
std::string format_real(double v);

/// Parses a real written by format_real; throws std::runtime_error on garbage.
double parse_real(std::string_view token);
long long parse_integer(std::string_view token);

/// Splits on any run of the given delimiter characters.
std::vector<std::string> split(std::string_view line, std::string_view delims);

} // namespace hmb
