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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "dweb/error.hpp"

namespace dweb {

enum class QuoteStyle { kNone, kDoubleQuote, kBacktick };

/// What a SQL engine accepts. Engines without CUBE/ROLLUP get the
/// UNION ALL expansion at render time.
struct DialectDescriptor {
  std::string name;
  bool supports_cube = true;
  bool supports_rollup = true;
  bool supports_having_alias = false;
  /// HAVING is legal on an aggregate query without GROUP BY.
  bool supports_having_without_group_by = true;
  /// Most SELECTs one compound statement may hold; 0 means unbounded.
  std::size_t max_compound_select = 0;
  QuoteStyle quoting = QuoteStyle::kNone;
  std::string integer_type = "INTEGER";
  std::string real_type = "REAL";
  std::string varchar_type = "VARCHAR";

  std::string identifier(std::string_view id) const {
    switch (quoting) {
      case QuoteStyle::kDoubleQuote:
        return "\"" + std::string(id) + "\"";
      case QuoteStyle::kBacktick:
        return "`" + std::string(id) + "`";
      case QuoteStyle::kNone:
        break;
    }
    return std::string(id);
  }

  std::string varchar(std::size_t width) const {
    if (varchar_type.empty()) throw UnsupportedDialectError(name + ": no character type mapping");
    return varchar_type + "(" + std::to_string(width) + ")";
  }
  const std::string& integer() const {
    if (integer_type.empty()) throw UnsupportedDialectError(name + ": no integer type mapping");
    return integer_type;
  }
  const std::string& real() const {
    if (real_type.empty()) throw UnsupportedDialectError(name + ": no real type mapping");
    return real_type;
  }
};

namespace dialects {

/// Canonical SQL-99; also the form stored in workload files.
inline DialectDescriptor ansi() { return DialectDescriptor{.name = "ansi"}; }

inline DialectDescriptor sqlite() {
  return DialectDescriptor{.name = "sqlite",
                           .supports_cube = false,
                           .supports_rollup = false,
                           .supports_having_alias = true,
                           .supports_having_without_group_by = false,
                           .max_compound_select = 500};
}

inline DialectDescriptor postgresql() { return DialectDescriptor{.name = "postgresql"}; }

inline DialectDescriptor mysql() {
  // MySQL only has the non-standard WITH ROLLUP form; both operators expand.
  return DialectDescriptor{.name = "mysql",
                           .supports_cube = false,
                           .supports_rollup = false,
                           .supports_having_alias = true,
                           .quoting = QuoteStyle::kBacktick,
                           .real_type = "FLOAT"};
}

inline std::vector<std::string> names() { return {"ansi", "sqlite", "postgresql", "mysql"}; }

inline DialectDescriptor by_name(std::string_view name) {
  if (name == "ansi" || name == "sql99") return ansi();
  if (name == "sqlite") return sqlite();
  if (name == "postgresql" || name == "postgres") return postgresql();
  if (name == "mysql") return mysql();
  throw UnsupportedDialectError("unknown dialect '" + std::string(name) + "'");
}

}  // namespace dialects

}  // namespace dweb
