#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "curio/error.hpp"

namespace curio {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

inline void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write file: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed: " + path);
}

/// Shortest exact decimal representation; round-trips bit-exactly, which the
/// reproducibility checks on CSV artifacts rely on.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("bad number '" + std::string(s) + "' in " + context);
  return v;
}

inline std::int64_t parse_int(std::string_view s, const std::string& context) {
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("bad integer '" + std::string(s) + "' in " + context);
  return v;
}

struct CsvRecord {
  std::size_t line = 0;  // 1-based line of the record's first character
  std::vector<std::string> fields;
};

/// RFC 4180-style parser: quoted fields, "" escapes, embedded delimiters and
/// newlines, CRLF tolerated. Completely blank lines are skipped.
inline std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    CsvRecord rec;
    rec.line = line;
    bool saw_any = false;
    std::string field;
    bool done = false;
    while (!done) {
      field.clear();
      if (i < n && text[i] == '"') {
        ++i;
        bool closed = false;
        while (i < n) {
          char c = text[i];
          if (c == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
            } else {
              ++i;
              closed = true;
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
            ++i;
          }
        }
        if (!closed)
          throw Error("line " + std::to_string(rec.line) +
                      ": unterminated quoted field");
        if (i < n && text[i] != ',' && text[i] != '\n' &&
            !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n'))
          throw Error("line " + std::to_string(line) +
                      ": unexpected character after closing quote");
      } else {
        while (i < n && text[i] != ',' && text[i] != '\n') {
          field.push_back(text[i]);
          ++i;
        }
        if (!field.empty() && field.back() == '\r' &&
            (i >= n || text[i] == '\n'))
          field.pop_back();
      }
      rec.fields.push_back(field);
      saw_any = saw_any || !field.empty();
      if (i < n && text[i] == ',') {
        ++i;
        continue;
      }
      if (i < n && text[i] == '\r') ++i;
      if (i < n && text[i] == '\n') {
        ++i;
        ++line;
      }
      done = true;
    }
    if (rec.fields.size() == 1 && !saw_any) continue;  // blank line
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<CsvRecord> parse_csv_file(const std::string& path) {
  return parse_csv(read_file(path));
}

inline std::string csv_quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

inline void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw Error("cannot create directory " + path + ": " + ec.message());
}

inline bool file_exists(const std::string& path) {
  return std::filesystem::exists(path);
}

}  // namespace curio
