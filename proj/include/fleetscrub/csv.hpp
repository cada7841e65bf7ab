#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fleetscrub::csv {

/// Splits one CSV line on commas and trims surrounding whitespace per field.
std::vector<std::string> split_fields(std::string_view line);

/// Strict numeric parses; the whole (trimmed) field must be consumed and the
/// value must be finite.
std::optional<double> parse_double(std::string_view field);
std::optional<std::int64_t> parse_int(std::string_view field);

/// Lexical test used for header detection: the field reads as a number,
/// finite or not.
bool is_numeric_like(std::string_view field);

/// Shortest round-trip decimal representation of a double (std::to_chars).
std::string format_double(double value);

/// Reads all lines of a text file. Throws fleetscrub::Error if it cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace fleetscrub::csv
