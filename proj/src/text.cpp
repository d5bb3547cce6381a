#include "aquactl/text.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aquactl {

namespace {

std::string to_chars_string(double x, bool exact) {
  std::array<char, 64> buf{};
  const auto res = exact ? std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                         std::chars_format::general, 17)
                         : std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

template <typename T>
T parse_number(std::string_view s, const char* what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T value{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("expected " + std::string(what) + ", got '" + std::string(s) + "'");
  return value;
}

}  // namespace

std::string format_exact(double x) { return to_chars_string(x, true); }

std::string format_short(double x) { return to_chars_string(x, false); }

double parse_double(std::string_view s) { return parse_number<double>(s, "a number"); }

std::int64_t parse_int(std::string_view s) { return parse_number<std::int64_t>(s, "an integer"); }

std::uint64_t parse_uint(std::string_view s) {
  return parse_number<std::uint64_t>(s, "an unsigned integer");
}

bool parse_bool(std::string_view s) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("expected true or false, got '" + std::string(s) + "'");
}

std::vector<double> parse_double_list(std::string_view s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  for (const auto& field : split(s, ',')) out.push_back(parse_double(field));
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace aquactl
