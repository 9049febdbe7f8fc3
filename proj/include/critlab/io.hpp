#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace critlab {

// Shortest round-trip decimal form; locale-independent, '.' separator.
inline std::string fmt_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);  // LF line endings everywhere
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown format: " + s);
}

}  // namespace critlab
