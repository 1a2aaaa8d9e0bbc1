#pragma once

#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace holant {

// RFC-4180-style quoting: quote fields containing comma, quote or newline;
// double embedded quotes.
inline std::string csv_escape(std::string_view field) {
  bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

// Stable textual form for doubles; identical inputs give identical bytes.
inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline void csv_row(std::ostream& os, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(fields[i]);
  }
  os << '\n';
}

inline void csv_row(std::ostream& os, std::initializer_list<std::string> fields) {
  csv_row(os, std::span<const std::string>(fields.begin(), fields.size()));
}

}  // namespace holant
