#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitggm::util {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;

/// Splits on runs of whitespace; empty fields are dropped.
std::vector<std::string> split_ws(std::string_view s);

/// Splits on a single delimiter; empty fields are kept.
std::vector<std::string> split(std::string_view s, char delim);

/// Parses the whole token as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

/// Shortest-safe text form of a double: 17 significant digits, round-trips exactly.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace gaitggm::util
