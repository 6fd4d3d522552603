#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace vlmprobe::csv {

/// Quotes a field when it contains a separator, quote or line break.
inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// 17 significant digits, enough to round-trip any double. NaN becomes an
/// empty cell.
inline std::string number(double v) {
  if (std::isnan(v)) return {};
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

inline std::string number(std::size_t v) { return std::to_string(v); }

/// Reads one CSV record (RFC 4180 quoting, may span lines). Returns false at
/// end of input.
inline bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  std::string current;
  bool quoted = false;
  for (;;) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            current += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          current += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(current));
        current.clear();
      } else if (c != '\r') {
        current += c;
      }
    }
    if (!quoted || !std::getline(in, line)) break;
    current += '\n';
  }
  fields.push_back(std::move(current));
  return true;
}

}  // namespace vlmprobe::csv
