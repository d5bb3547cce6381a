#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aquactl {

/// %.17g formatting; parses back to the identical double.
std::string format_exact(double x);
/// Shortest representation that parses back to the identical double.
std::string format_short(double x);

/// Strict parsers: the whole (trimmed) field must be consumed.
/// Throw std::invalid_argument on failure.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);
std::uint64_t parse_uint(std::string_view s);
bool parse_bool(std::string_view s);
std::vector<double> parse_double_list(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char sep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace aquactl
