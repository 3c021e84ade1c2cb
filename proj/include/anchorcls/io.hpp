#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "anchorcls/errors.hpp"

namespace anchorcls {

using json = nlohmann::json;
namespace fs = std::filesystem;

inline std::string trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

/// Shortest round-trip decimal representation; used for CSV output so that
/// identical doubles always print identically.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir.string() + "': " + ec.message());
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file '" + path.string() + "' for writing");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline json load_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("invalid JSON in '" + path.string() + "': " + e.what());
  }
  return j;
}

inline void save_json_file(const fs::path& path, const json& j, int indent = 2) {
  write_file(path, j.dump(indent) + "\n");
}

/// Calls fn(line_number, parsed_object) for every non-blank line.
/// Line numbers are 1-based; parse failures name the line.
inline void for_each_jsonl(const fs::path& path,
                           const std::function<void(std::size_t, const json&)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("malformed row at " + path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
    fn(line_no, j);
  }
}

inline std::vector<json> load_jsonl(const fs::path& path) {
  std::vector<json> rows;
  for_each_jsonl(path, [&](std::size_t, const json& j) { rows.push_back(j); });
  return rows;
}

inline void save_jsonl(const fs::path& path, const std::vector<json>& rows) {
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open file '" + path.string() + "' for writing");
  for (const auto& row : rows) out << row.dump() << "\n";
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

/// One parsed CSV record plus the line it started on (for error messages).
struct CsvRecord {
  std::size_t line_no = 0;
  std::vector<std::string> fields;
};

/// Minimal RFC-4180 reader: quoted fields, doubled quotes, embedded
/// separators and newlines. First record is the header.
inline std::vector<CsvRecord> read_csv(const fs::path& path) {
  std::string data = read_file(path);
  std::vector<CsvRecord> records;
  CsvRecord current;
  current.line_no = 1;
  std::string field;
  bool in_quotes = false;
  bool any_field = false;  // true once the current field saw content (incl. empty quotes)
  std::size_t line_no = 1;

  auto end_field = [&] {
    current.fields.push_back(field);
    field.clear();
    any_field = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(current));
    current = CsvRecord{};
    current.line_no = line_no;
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    char c = data[i];
    if (c == '\n') ++line_no;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_field = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        any_field = true;
        break;
    }
  }
  if (in_quotes) throw DataError("unterminated quote in '" + path.string() + "'");
  if (!field.empty() || any_field || !current.fields.empty()) end_record();
  return records;
}

/// Replaces characters unsafe in file names; class ids may contain anything.
inline std::string sanitize_filename(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  if (out.empty()) out = "_";
  return out;
}

}  // namespace anchorcls
