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

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dweb/dialect.hpp"
#include "dweb/error.hpp"
#include "dweb/model.hpp"
#include "dweb/value.hpp"

namespace dweb {

using Duration = std::chrono::nanoseconds;
using Clock = std::chrono::steady_clock;

struct QueryTiming {
  std::int64_t rows = 0;
  Duration duration{0};
};

/// Uniform SQL execution surface. One owner per handle.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual const DialectDescriptor& dialect() const = 0;

  /// Applies statements in order; stops at the first failure and throws
  /// StatementError carrying its index.
  virtual std::size_t execute_ddl(std::span<const std::string> statements) = 0;

  /// All-or-nothing insert of one batch, in row order.
  virtual std::size_t bulk_insert(const TupleBatch& batch) = 0;

  /// Runs a query and drains every result row; the duration covers both.
  virtual QueryTiming execute_timed(std::string_view sql) = 0;

  /// Runs a data-modifying statement, returns the number of affected rows.
  virtual std::int64_t execute(std::string_view sql) = 0;

  /// Runs a query and returns all rows.
  virtual std::vector<Row> query(std::string_view sql) = 0;

  virtual std::vector<std::string> list_tables() = 0;

  /// Tables whose names follow the standard warehouse naming (FTn, DIMd_l),
  /// in a drop-safe order: fact tables, then each dimension finest level first.
  std::vector<std::string> warehouse_tables() {
    static const std::regex fact_re("^FT([0-9]+)$", std::regex::icase);
    static const std::regex level_re("^DIM([0-9]+)_([0-9]+)$", std::regex::icase);
    struct Entry {
      int group;
      long a;
      long b;
      std::string name;
    };
    std::vector<Entry> entries;
    for (auto& t : list_tables()) {
      std::smatch m;
      if (std::regex_match(t, m, fact_re)) {
        entries.push_back({0, std::stol(m[1]), 0, t});
      } else if (std::regex_match(t, m, level_re)) {
        entries.push_back({1, std::stol(m[1]), std::stol(m[2]), t});
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      return std::tie(x.group, x.a, x.b) < std::tie(y.group, y.a, y.b);
    });
    std::vector<std::string> names;
    for (auto& e : entries) names.push_back(std::move(e.name));
    return names;
  }

  bool has_warehouse_tables() { return !warehouse_tables().empty(); }

  /// Drops every warehouse table. Idempotent; returns how many were dropped.
  std::size_t reset_warehouse() {
    const auto tables = warehouse_tables();
    for (const auto& t : tables) execute("DROP TABLE " + dialect().identifier(t));
    return tables.size();
  }

  /// COUNT(*) per schema table.
  WarehouseStats warehouse_stats(const WarehouseSchema& schema) {
    WarehouseStats stats;
    for (const auto& table : schema.tables_in_dependency_order()) {
      const auto rows = query("SELECT COUNT(*) FROM " + dialect().identifier(table));
      std::int64_t n = 0;
      if (!rows.empty() && !rows.front().empty()) {
        if (const auto* v = std::get_if<std::int64_t>(&rows.front().front())) n = *v;
      }
      stats.tables.push_back({table, n});
    }
    return stats;
  }
};

}  // namespace dweb
