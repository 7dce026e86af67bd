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
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "dweb/dialect.hpp"
#include "dweb/error.hpp"
#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/random.hpp"

namespace dweb {

/// hhlevel_size * sfactor^(levels below the coarsest), saturating.
inline std::int64_t level_cardinality(std::size_t hhlevel_size, double sfactor, std::size_t nb_levels,
                                      std::size_t level) {
  const double depth = static_cast<double>(nb_levels - 1 - level);
  const double v = round_half_up(static_cast<double>(hhlevel_size) * std::pow(sfactor, depth));
  constexpr double kMax = static_cast<double>(std::int64_t{1} << 62);
  if (!(v < kMax)) return std::int64_t{1} << 62;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(v));
}

/// Width of a member column: attribute-name prefix, '_' and a referential string.
inline std::size_t member_width(std::string_view attribute) {
  return attribute.size() + 1 + StringReferential::kStringLength;
}

/// Instantiates the metaschema: dimensions first, then fact tables whose
/// dimensions are drawn with random_dimension.
inline WarehouseSchema build_schema(const LowLevelParams& low, SeededRng& rng) {
  if (auto report = validate_params(low); !report.ok()) {
    throw ConfigError("invalid low-level parameters: " + report.violations.front());
  }
  WarehouseSchema schema;
  for (std::size_t d = 0; d < low.tot_nb_dim; ++d) {
    DimensionDef dim;
    dim.index = d;
    const std::size_t nb_levels = low.nb_levels[d];
    for (std::size_t h = 0; h < nb_levels; ++h) {
      HierarchyLevelDef lvl;
      lvl.table_name = naming::level_table(d, h);
      lvl.primary_key = naming::primary_key(lvl.table_name);
      for (std::size_t k = 0; k < low.nb_att[d][h]; ++k) lvl.members.push_back(naming::member(lvl.table_name, k));
      if (h + 1 < nb_levels) lvl.foreign_key = naming::foreign_key(lvl.table_name);
      lvl.target_cardinality = level_cardinality(low.hhlevel_size[d], low.dim_sfactor[d], nb_levels, h);
      dim.levels.push_back(std::move(lvl));
    }
    schema.dimensions.push_back(std::move(dim));
  }

  for (std::size_t f = 0; f < low.nb_ft; ++f) {
    FactTableDef fact;
    fact.table_name = naming::fact_table(f);
    fact.density = low.density[f];
    for (std::size_t k = 0; k < low.nb_dim[f]; ++k) {
      std::size_t d = 0;
      try {
        d = random_dimension(rng, low.tot_nb_dim, fact.dim_refs);
      } catch (const EmptyDomainError& e) {
        throw Error(std::string("build_schema invariant violated: ") + e.what());
      }
      fact.dim_refs.push_back(d);
      fact.key_attrs.push_back(naming::fact_key(fact.table_name, schema.dimensions[d].finest().table_name));
    }
    for (std::size_t k = 0; k < low.nb_meas[f]; ++k) fact.measures.push_back(naming::measure(fact.table_name, k));
    schema.fact_tables.push_back(std::move(fact));
  }
  return schema;
}

struct DdlOptions {
  /// Declare PRIMARY KEY / FOREIGN KEY constraints.
  bool constraints = true;
};

/// CREATE TABLE statements (without trailing ';'), coarsest levels first so
/// the list runs in order on an empty database.
inline std::vector<std::string> emit_ddl(const WarehouseSchema& schema, const DialectDescriptor& dialect,
                                         const DdlOptions& options = {}) {
  std::vector<std::string> out;
  const auto& integer = dialect.integer();
  const auto& real = dialect.real();
  auto id = [&](std::string_view s) { return dialect.identifier(s); };

  for (const auto& dim : schema.dimensions) {
    for (std::size_t h = dim.levels.size(); h-- > 0;) {
      const auto& lvl = dim.levels[h];
      std::string sql = "CREATE TABLE " + id(lvl.table_name) + " (" + id(lvl.primary_key) + " " + integer + " NOT NULL";
      for (const auto& m : lvl.members) sql += ", " + id(m) + " " + dialect.varchar(member_width(m));
      if (lvl.foreign_key) sql += ", " + id(*lvl.foreign_key) + " " + integer + " NOT NULL";
      if (options.constraints) {
        sql += ", PRIMARY KEY (" + id(lvl.primary_key) + ")";
        if (lvl.foreign_key) {
          const auto& coarser = dim.levels[*dim.coarser_link(h)];
          sql += ", FOREIGN KEY (" + id(*lvl.foreign_key) + ") REFERENCES " + id(coarser.table_name) + " (" +
                 id(coarser.primary_key) + ")";
        }
      }
      sql += ")";
      out.push_back(std::move(sql));
    }
  }

  for (const auto& fact : schema.fact_tables) {
    std::string sql = "CREATE TABLE " + id(fact.table_name) + " (";
    for (std::size_t k = 0; k < fact.key_attrs.size(); ++k) {
      if (k) sql += ", ";
      sql += id(fact.key_attrs[k]) + " " + integer + " NOT NULL";
    }
    for (const auto& m : fact.measures) sql += ", " + id(m) + " " + real;
    if (options.constraints) {
      sql += ", PRIMARY KEY (";
      for (std::size_t k = 0; k < fact.key_attrs.size(); ++k) sql += (k ? ", " : "") + id(fact.key_attrs[k]);
      sql += ")";
      for (std::size_t k = 0; k < fact.key_attrs.size(); ++k) {
        const auto& finest = schema.dimensions[fact.dim_refs[k]].finest();
        sql += ", FOREIGN KEY (" + id(fact.key_attrs[k]) + ") REFERENCES " + id(finest.table_name) + " (" +
               id(finest.primary_key) + ")";
      }
    }
    sql += ")";
    out.push_back(std::move(sql));
  }
  return out;
}

/// One ';'-terminated statement per line.
inline void write_ddl(std::ostream& out, const std::vector<std::string>& statements) {
  for (const auto& s : statements) out << s << ";\n";
}

inline void write_ddl_file(const std::string& path, const std::vector<std::string>& statements) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write DDL file " + path);
  write_ddl(out, statements);
  if (!out) throw Error("error writing DDL file " + path);
}

}  // namespace dweb
