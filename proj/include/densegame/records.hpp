#pragma once

// Line-oriented key=value records used by every plain-text input file:
//
//   # comment
//   cube stage=C1 id=A volume_cm3=1000 mass_g=500
//   string key=q01.prompt text="Which cube is denser?"
//
// The first token names the record type. Values may be double-quoted, with
// \" and \\ escapes. A `#` outside quotes starts a comment.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <initializer_list>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "densegame/error.hpp"

namespace densegame {

/// Exact decimal parse (correctly rounded); the whole string must be consumed.
inline double parse_decimal(std::string_view text, std::size_t line = 0) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ParseError("invalid number '" + std::string(text) + "'", line);
  return v;
}

inline long long parse_integer(std::string_view text, std::size_t line = 0) {
  long long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty())
    throw ParseError("invalid integer '" + std::string(text) + "'", line);
  return v;
}

class Record {
 public:
  Record(std::string type, std::vector<std::pair<std::string, std::string>> fields, std::size_t line)
      : type_(std::move(type)), fields_(std::move(fields)), line_(line) {}

  const std::string& type() const { return type_; }
  std::size_t line() const { return line_; }
  const std::vector<std::pair<std::string, std::string>>& fields() const { return fields_; }

  std::optional<std::string> find(std::string_view key) const {
    for (const auto& [k, v] : fields_)
      if (k == key) return v;
    return std::nullopt;
  }

  const std::string& get(std::string_view key) const {
    for (const auto& [k, v] : fields_)
      if (k == key) return v;
    throw ParseError(type_ + " record is missing '" + std::string(key) + "'", line_);
  }

  double get_decimal(std::string_view key) const { return parse_decimal(get(key), line_); }
  long long get_integer(std::string_view key) const { return parse_integer(get(key), line_); }

  /// Rejects keys outside `allowed`.
  void expect_only(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [k, v] : fields_) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
        throw ParseError(type_ + " record has unknown field '" + k + "'", line_);
    }
  }

 private:
  std::string type_;
  std::vector<std::pair<std::string, std::string>> fields_;
  std::size_t line_;
};

namespace detail {

inline std::vector<std::string> tokenize_record_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> tokens;
  std::string cur;
  bool in_token = false;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '\\') {
        if (i + 1 >= line.size()) throw ParseError("dangling escape", line_no);
        const char n = line[++i];
        if (n != '"' && n != '\\') throw ParseError(std::string("unknown escape \\") + n, line_no);
        cur += n;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
      continue;
    }
    if (c == '#') break;
    if (c == ' ' || c == '\t' || c == '\r') {
      if (in_token) tokens.push_back(std::move(cur));
      cur.clear();
      in_token = false;
      continue;
    }
    in_token = true;
    if (c == '"') {
      quoted = true;
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unterminated quote", line_no);
  if (in_token) tokens.push_back(std::move(cur));
  return tokens;
}

}  // namespace detail

inline std::vector<Record> parse_records(std::istream& in) {
  std::vector<Record> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = detail::tokenize_record_line(line, line_no);
    if (tokens.empty()) continue;
    std::vector<std::pair<std::string, std::string>> fields;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value, got '" + tokens[i] + "'", line_no);
      std::string key = tokens[i].substr(0, eq);
      for (const auto& [k, v] : fields)
        if (k == key) throw ParseError("duplicate field '" + key + "'", line_no);
      fields.emplace_back(std::move(key), tokens[i].substr(eq + 1));
    }
    out.emplace_back(std::move(tokens[0]), std::move(fields), line_no);
  }
  return out;
}

inline std::vector<Record> parse_records(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_records(in);
}

/// Quotes a value when it would not survive tokenization bare.
inline std::string quote_field(std::string_view value) {
  const bool plain = !value.empty() && value.find_first_of(" \t\r\"#\\") == std::string_view::npos;
  if (plain) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

/// Comma-separated list field, e.g. options=q01.a,q01.b
inline std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = value.find(',', start);
    out.emplace_back(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace densegame
