#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace score::util {

std::vector<std::string_view> split_ws(std::string_view text);
std::string_view trim(std::string_view text);
std::string_view strip_cr(std::string_view line);

// Strict full-token parses; nullopt on any leftover characters.
std::optional<double> parse_double(std::string_view token);
std::optional<std::uint32_t> parse_u32(std::string_view token);
std::optional<int> parse_int(std::string_view token);

// Shortest fixed-notation string that parses back to the same double.
std::string format_decimal(double value);

// format_decimal with a guaranteed decimal point ("0" -> "0.0").
// Canonical number form for answer lines.
std::string format_number(double value);

}  // namespace score::util
