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
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dweb/error.hpp"

namespace dweb {

/// One table of a dimension hierarchy. Columns are laid out as
/// primary key, members, then the foreign key to the next-coarser level.
struct HierarchyLevelDef {
  std::string table_name;
  std::string primary_key;
  std::vector<std::string> members;
  std::optional<std::string> foreign_key;
  std::int64_t target_cardinality = 0;

  std::vector<std::string> columns() const {
    std::vector<std::string> cols;
    cols.reserve(members.size() + 2);
    cols.push_back(primary_key);
    cols.insert(cols.end(), members.begin(), members.end());
    if (foreign_key) cols.push_back(*foreign_key);
    return cols;
  }

  bool operator==(const HierarchyLevelDef&) const = default;
};

/// A dimension. levels[0] is the finest level, levels.back() the coarsest.
struct DimensionDef {
  std::size_t index = 0;
  std::vector<HierarchyLevelDef> levels;

  const HierarchyLevelDef& finest() const { return levels.front(); }
  const HierarchyLevelDef& coarsest() const { return levels.back(); }

  /// Level that `level`'s foreign key references, if any.
  std::optional<std::size_t> coarser_link(std::size_t level) const {
    if (level + 1 < levels.size()) return level + 1;
    return std::nullopt;
  }
  /// Level one step finer (the drill-down target), if any.
  std::optional<std::size_t> finer_link(std::size_t level) const {
    if (level > 0) return level - 1;
    return std::nullopt;
  }

  bool operator==(const DimensionDef&) const = default;
};

struct FactTableDef {
  std::string table_name;
  std::vector<std::size_t> dim_refs;       // dimension indices, in key order
  std::vector<std::string> key_attrs;      // aligned with dim_refs
  std::vector<std::string> measures;
  double density = 1.0;

  std::vector<std::string> columns() const {
    std::vector<std::string> cols(key_attrs);
    cols.insert(cols.end(), measures.begin(), measures.end());
    return cols;
  }

  bool operator==(const FactTableDef&) const = default;
};

struct WarehouseSchema {
  std::vector<FactTableDef> fact_tables;
  std::vector<DimensionDef> dimensions;

  const FactTableDef* find_fact(std::string_view name) const {
    for (const auto& f : fact_tables) {
      if (f.table_name == name) return &f;
    }
    return nullptr;
  }

  struct LevelRef {
    std::size_t dimension;
    std::size_t level;
  };

  std::optional<LevelRef> find_level(std::string_view name) const {
    for (const auto& d : dimensions) {
      for (std::size_t h = 0; h < d.levels.size(); ++h) {
        if (d.levels[h].table_name == name) return LevelRef{d.index, h};
      }
    }
    return std::nullopt;
  }

  const HierarchyLevelDef& level(LevelRef ref) const { return dimensions.at(ref.dimension).levels.at(ref.level); }

  /// Column list of any table in the schema.
  std::vector<std::string> columns_of(std::string_view table) const {
    if (const auto* f = find_fact(table)) return f->columns();
    if (auto ref = find_level(table)) return level(*ref).columns();
    throw Error("unknown table " + std::string(table));
  }

  /// Every table name, each dimension coarsest level first, then fact tables.
  /// Creating tables in this order satisfies every foreign key.
  std::vector<std::string> tables_in_dependency_order() const {
    std::vector<std::string> names;
    for (const auto& d : dimensions) {
      for (auto it = d.levels.rbegin(); it != d.levels.rend(); ++it) names.push_back(it->table_name);
    }
    for (const auto& f : fact_tables) names.push_back(f.table_name);
    return names;
  }

  bool operator==(const WarehouseSchema&) const = default;
};

struct TableCount {
  std::string table;
  std::int64_t rows = 0;

  bool operator==(const TableCount&) const = default;
};

/// Per-table tuple counts.
struct WarehouseStats {
  std::vector<TableCount> tables;

  std::int64_t global_size() const {
    return std::accumulate(tables.begin(), tables.end(), std::int64_t{0},
                           [](std::int64_t acc, const TableCount& t) { return acc + t.rows; });
  }

  std::int64_t count(std::string_view table) const {
    for (const auto& t : tables) {
      if (t.table == table) return t.rows;
    }
    throw Error("no statistics for table " + std::string(table));
  }

  bool operator==(const WarehouseStats&) const = default;
};

namespace naming {

inline std::string fact_table(std::size_t f) { return "FT" + std::to_string(f + 1); }
inline std::string level_table(std::size_t d, std::size_t level) {
  return "DIM" + std::to_string(d + 1) + "_" + std::to_string(level + 1);
}
inline std::string primary_key(std::string_view table) { return std::string(table) + "_PK"; }
inline std::string foreign_key(std::string_view table) { return std::string(table) + "_FK"; }
inline std::string member(std::string_view table, std::size_t k) {
  return std::string(table) + "_DESCR" + std::to_string(k + 1);
}
inline std::string measure(std::string_view fact, std::size_t k) {
  return std::string(fact) + "_MEAS" + std::to_string(k + 1);
}
/// Fact-table key column referencing a dimension's finest level.
inline std::string fact_key(std::string_view fact, std::string_view finest_level) {
  return std::string(fact) + "_" + std::string(finest_level) + "_FK";
}

}  // namespace naming

}  // namespace dweb
