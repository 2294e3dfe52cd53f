// Minimal RFC 4180 helpers for the tables this project reads and writes.
#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace chargecast::csv {

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one line; surrounding whitespace of unquoted fields is trimmed.
inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  auto flush = [&] {
    if (!was_quoted) {
      const auto b = field.find_first_not_of(" \t\r");
      const auto e = field.find_last_not_of(" \t\r");
      field = b == std::string::npos ? std::string() : field.substr(b, e - b + 1);
    }
    out.push_back(std::move(field));
    field.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
      field.clear();
    } else if (c == ',') {
      flush();
    } else {
      field += c;
    }
  }
  flush();
  return out;
}

// Fixed six decimals, '.' separator regardless of locale.
inline std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // folds -0.0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace chargecast::csv
