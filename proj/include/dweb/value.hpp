/*
 * Copyright (c) 2026 The dweb Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace dweb {

/// A cell: NULL, integer key, numeric measure, or string member.
using Value = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

/// Rows destined for one table; rows are aligned with `columns`.
struct TupleBatch {
  std::string table_name;
  std::vector<std::string> columns;
  std::vector<Row> rows;
  std::size_t ordinal = 0;
};

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// Plain text form: NULL, integers, shortest round-trip reals, raw strings.
inline std::string to_text(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "NULL"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_real(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

inline std::string quote_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '\'';
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

inline std::string sql_literal(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return quote_string(*s);
  return to_text(v);
}

/// RFC 4180 field (quoted only when needed).
inline std::string csv_field(const Value& v) {
  if (is_null(v)) return "";
  auto text = to_text(v);
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace dweb
