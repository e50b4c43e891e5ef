#pragma once

#include <charconv>
#include <optional>
#include <string>
#include <string_view>

namespace avgcell {

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] std::string format_shortest(double value);

/// 17 significant digits, the CSV number format.
[[nodiscard]] std::string format_g17(double value);

/// Strict parse of a decimal or scientific literal. Rejects trailing text,
/// leading '+', and non-finite values.
[[nodiscard]] std::optional<double> parse_double(std::string_view text);

}  // namespace avgcell
