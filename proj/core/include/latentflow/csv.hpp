#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latentflow::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes;
/// records spanning several lines are not supported.
std::vector<std::string> split(std::string_view line);

/// Always wraps the field in double quotes.
std::string quote(std::string_view field);

/// Quotes only when the field contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

std::optional<double> parse_number(std::string_view text);
std::optional<long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace latentflow::csv
