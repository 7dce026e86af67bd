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

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/schema_gen.hpp"

namespace dweb {

/// Fixed row-width model used before loading.
namespace width {
inline constexpr std::size_t kKey = 4;
inline constexpr std::size_t kMeasure = 4;
inline std::size_t member(std::string_view attribute) { return StringReferential::kStringLength + attribute.size(); }
}  // namespace width

struct TableSizeEstimate {
  std::string table;
  double rows = 0;
  std::size_t row_width = 0;
  double bytes = 0;
};

struct SizeEstimate {
  /// Estimates past this many bytes are reported as too large.
  static constexpr double kLimitBytes = 9.2e18;

  std::vector<TableSizeEstimate> tables;
  double total_bytes = 0;
  bool too_large = false;

  double megabytes() const { return total_bytes / (1024.0 * 1024.0); }
};

inline std::size_t row_width(const HierarchyLevelDef& level) {
  std::size_t w = width::kKey;
  for (const auto& m : level.members) w += width::member(m);
  if (level.foreign_key) w += width::kKey;
  return w;
}

inline std::size_t row_width(const FactTableDef& fact) {
  return fact.key_attrs.size() * width::kKey + fact.measures.size() * width::kMeasure;
}

inline SizeEstimate estimate_size(const WarehouseSchema& schema) {
  SizeEstimate est;
  auto add = [&](const std::string& table, double rows, std::size_t w) {
    const double bytes = rows * static_cast<double>(w);
    est.tables.push_back({table, rows, w, bytes});
    est.total_bytes += bytes;
  };
  for (const auto& dim : schema.dimensions) {
    for (std::size_t h = dim.levels.size(); h-- > 0;) {
      const auto& lvl = dim.levels[h];
      add(lvl.table_name, static_cast<double>(lvl.target_cardinality), row_width(lvl));
    }
  }
  for (const auto& fact : schema.fact_tables) {
    double candidates = 1.0;
    for (auto d : fact.dim_refs) candidates *= static_cast<double>(schema.dimensions[d].finest().target_cardinality);
    add(fact.table_name, fact.density * candidates, row_width(fact));
  }
  est.too_large = !std::isfinite(est.total_bytes) || est.total_bytes > SizeEstimate::kLimitBytes;
  return est;
}

/// Builds the schema the same way a load would and estimates it.
inline SizeEstimate estimate_size(const LowLevelParams& low, SeededRng& schema_rng) {
  return estimate_size(build_schema(low, schema_rng));
}

}  // namespace dweb
