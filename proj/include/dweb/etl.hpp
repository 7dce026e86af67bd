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

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dweb/backend.hpp"
#include "dweb/data_gen.hpp"
#include "dweb/error.hpp"
#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/random.hpp"
#include "dweb/value.hpp"

namespace dweb {

/// Insert/modify quotas of one dimension level.
struct LevelQuota {
  std::size_t dimension = 0;
  std::size_t level = 0;
  std::string table;
  double insert_quota = 0;
  double modify_quota = 0;
  std::int64_t inserts = 0;
  std::int64_t modifies = 0;
};

struct FactQuota {
  std::size_t fact = 0;
  std::string table;
  double insert_quota = 0;
  double modify_quota = 0;
  std::int64_t inserts = 0;
  std::int64_t modifies = 0;
};

/// Levels are listed dimension by dimension, coarsest level first.
struct RefreshPlan {
  std::vector<LevelQuota> levels;
  std::vector<FactQuota> facts;

  std::int64_t dimension_operations() const {
    std::int64_t n = 0;
    for (const auto& l : levels) n += l.inserts + l.modifies;
    return n;
  }
  std::int64_t fact_operations() const {
    std::int64_t n = 0;
    for (const auto& f : facts) n += f.inserts + f.modifies;
    return n;
  }
  std::int64_t total_operations() const { return dimension_operations() + fact_operations(); }
  bool empty() const { return total_operations() == 0; }
};

/// floor(quota) plus one more with probability frac(quota).
inline std::int64_t realize_quota(double quota, SeededRng& rng) {
  if (!(quota > 0.0)) return 0;
  const double whole = std::floor(quota);
  return static_cast<std::int64_t>(whole) + (bernoulli(rng, quota - whole) ? 1 : 0);
}

/// Dimension level quota: global_size * grr * drr * (ir|mr) / tot_nb_dim / nb_levels(d).
/// Fact table quota: global_size * grr * frr * (ir|mr) / nb_ft.
inline RefreshPlan plan_refresh(const EtlParams& params, const WarehouseStats& stats, const WarehouseSchema& schema,
                                SeededRng& rng) {
  const auto global = static_cast<double>(stats.global_size());
  if (!(global > 0.0)) throw PreconditionError("plan_refresh: warehouse is empty");
  RefreshPlan plan;
  const double dims = static_cast<double>(schema.dimensions.size());
  const double dim_volume = global * params.grr * params.drr;
  for (const auto& dim : schema.dimensions) {
    const double levels = static_cast<double>(dim.levels.size());
    for (std::size_t h = dim.levels.size(); h-- > 0;) {
      LevelQuota q;
      q.dimension = dim.index;
      q.level = h;
      q.table = dim.levels[h].table_name;
      q.insert_quota = dim_volume * params.ir / dims / levels;
      q.modify_quota = dim_volume * params.mr() / dims / levels;
      q.inserts = realize_quota(q.insert_quota, rng);
      q.modifies = realize_quota(q.modify_quota, rng);
      plan.levels.push_back(std::move(q));
    }
  }
  const double facts = static_cast<double>(schema.fact_tables.size());
  const double fact_volume = global * params.grr * params.frr();
  for (std::size_t f = 0; f < schema.fact_tables.size(); ++f) {
    FactQuota q;
    q.fact = f;
    q.table = schema.fact_tables[f].table_name;
    q.insert_quota = fact_volume * params.ir / facts;
    q.modify_quota = fact_volume * params.mr() / facts;
    q.inserts = realize_quota(q.insert_quota, rng);
    q.modifies = realize_quota(q.modify_quota, rng);
    plan.facts.push_back(std::move(q));
  }
  return plan;
}

inline constexpr int kMaxFactKeyAttempts = 100;

/// Issues individual refresh statements. Table sizes (and hence the next
/// sequential key) are read once per table and then tracked locally, so one
/// instance should live for one refresh phase.
class Refresher {
 public:
  Refresher(const WarehouseSchema& schema, Backend& backend, SeededRng& rng, const StringReferential& referential)
      : schema_(schema), backend_(backend), rng_(rng), referential_(referential) {}

  /// Inserts one member with the next sequential key; its foreign key is a
  /// random existing key of the next-coarser level. Returns the new key.
  std::int64_t insert_into_dim(std::size_t dimension, std::size_t level) {
    const auto& dim = schema_.dimensions.at(dimension);
    const auto& lvl = dim.levels.at(level);
    const auto key = size_of(lvl.table_name) + 1;
    Row row;
    row.emplace_back(key);
    for (const auto& m : lvl.members) row.emplace_back(random_string(rng_, referential_, m));
    if (lvl.foreign_key) {
      const auto& coarser = dim.levels.at(*dim.coarser_link(level));
      row.emplace_back(random_key(rng_, size_of(coarser.table_name)));
    }
    insert_row(lvl.table_name, lvl.columns(), row);
    sizes_[lvl.table_name] = key;
    return key;
  }

  /// Inserts one fact on a composite key not yet present. Throws
  /// SaturationError after 100 colliding draws.
  std::vector<std::int64_t> insert_into_ft(std::size_t fact_index) {
    const auto& fact = schema_.fact_tables.at(fact_index);
    for (int attempt = 0; attempt < kMaxFactKeyAttempts; ++attempt) {
      std::vector<std::int64_t> key;
      for (auto d : fact.dim_refs) key.push_back(random_key(rng_, size_of(schema_.dimensions.at(d).finest().table_name)));
      const auto hits = backend_.query("SELECT 1 FROM " + id(fact.table_name) + " WHERE " + key_predicate(fact, key));
      if (!hits.empty()) continue;
      Row row(key.begin(), key.end());
      for (std::size_t m = 0; m < fact.measures.size(); ++m) row.emplace_back(random_measure(rng_));
      insert_row(fact.table_name, fact.columns(), row);
      sizes_[fact.table_name] = size_of(fact.table_name) + 1;
      return key;
    }
    throw SaturationError("fact table " + fact.table_name + ": no free key combination after " +
                          std::to_string(kMaxFactKeyAttempts) + " attempts");
  }

  /// Rewrites the descriptive members of one row (never keys). When the
  /// key is missing, one fresh key is drawn; a second miss throws StaleKeyError.
  std::vector<std::string> modify_dim(std::size_t dimension, std::size_t level, std::int64_t key) {
    const auto& lvl = schema_.dimensions.at(dimension).levels.at(level);
    std::vector<std::string> values;
    for (const auto& m : lvl.members) values.push_back(random_string(rng_, referential_, m));
    if (values.empty()) return values;
    std::string set;
    for (std::size_t i = 0; i < values.size(); ++i) {
      set += (i ? ", " : "") + id(lvl.members[i]) + " = " + quote_string(values[i]);
    }
    const auto update = [&](std::int64_t k) {
      return backend_.execute("UPDATE " + id(lvl.table_name) + " SET " + set + " WHERE " + id(lvl.primary_key) +
                              " = " + std::to_string(k));
    };
    if (update(key) > 0) return values;
    if (update(random_key(rng_, size_of(lvl.table_name))) > 0) return values;
    throw StaleKeyError("no row with key " + std::to_string(key) + " in " + lvl.table_name);
  }

  /// Rewrites every measure of one fact row with fresh values.
  std::vector<double> modify_ft(std::size_t fact_index, const std::vector<std::int64_t>& key) {
    const auto& fact = schema_.fact_tables.at(fact_index);
    if (apply_measures(fact, key)) return last_measures_;
    if (apply_measures(fact, pick_fact_key(fact_index))) return last_measures_;
    throw StaleKeyError("no fact row with the requested key in " + fact.table_name);
  }

  /// Key of an existing fact row, skewed by position in key order.
  std::vector<std::int64_t> pick_fact_key(std::size_t fact_index) {
    const auto& fact = schema_.fact_tables.at(fact_index);
    const auto offset = random_key(rng_, size_of(fact.table_name)) - 1;
    std::string cols;
    for (std::size_t k = 0; k < fact.key_attrs.size(); ++k) cols += (k ? ", " : "") + id(fact.key_attrs[k]);
    const auto rows = backend_.query("SELECT " + cols + " FROM " + id(fact.table_name) + " ORDER BY " + cols +
                                     " LIMIT 1 OFFSET " + std::to_string(offset));
    std::vector<std::int64_t> key;
    if (rows.empty()) return key;
    for (const auto& v : rows.front()) key.push_back(std::get<std::int64_t>(v));
    return key;
  }

  /// Current row count of a table, read once then tracked.
  std::int64_t size_of(const std::string& table) {
    if (auto it = sizes_.find(table); it != sizes_.end()) return it->second;
    const auto rows = backend_.query("SELECT COUNT(*) FROM " + id(table));
    std::int64_t n = 0;
    if (!rows.empty() && !rows.front().empty()) {
      if (const auto* v = std::get_if<std::int64_t>(&rows.front().front())) n = *v;
    }
    sizes_[table] = n;
    return n;
  }

 private:
  std::string id(const std::string& name) const { return backend_.dialect().identifier(name); }

  std::string key_predicate(const FactTableDef& fact, const std::vector<std::int64_t>& key) const {
    std::string s;
    for (std::size_t k = 0; k < key.size(); ++k) {
      s += (k ? " AND " : "") + id(fact.key_attrs[k]) + " = " + std::to_string(key[k]);
    }
    return s;
  }

  void insert_row(const std::string& table, const std::vector<std::string>& columns, const Row& row) {
    std::string cols, vals;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      cols += (i ? ", " : "") + id(columns[i]);
      vals += (i ? ", " : "") + sql_literal(row[i]);
    }
    backend_.execute("INSERT INTO " + id(table) + " (" + cols + ") VALUES (" + vals + ")");
  }

  bool apply_measures(const FactTableDef& fact, const std::vector<std::int64_t>& key) {
    if (key.size() != fact.key_attrs.size()) return false;
    last_measures_.clear();
    std::string set;
    for (std::size_t m = 0; m < fact.measures.size(); ++m) {
      last_measures_.push_back(random_measure(rng_));
      set += (m ? ", " : "") + id(fact.measures[m]) + " = " + format_real(last_measures_.back());
    }
    if (set.empty()) return true;
    return backend_.execute("UPDATE " + id(fact.table_name) + " SET " + set + " WHERE " + key_predicate(fact, key)) > 0;
  }

  const WarehouseSchema& schema_;
  Backend& backend_;
  SeededRng& rng_;
  const StringReferential& referential_;
  std::map<std::string, std::int64_t> sizes_;
  std::vector<double> last_measures_;
};

struct RefreshOutcome {
  std::int64_t inserts = 0;
  std::int64_t modifies = 0;
  Duration duration{0};
};

/// Dimension part of a plan, levels coarsest first so new foreign keys
/// always find their target.
inline RefreshOutcome refresh_dimensions(const RefreshPlan& plan, Refresher& refresher, SeededRng& rng) {
  RefreshOutcome out;
  const auto start = Clock::now();
  for (const auto& q : plan.levels) {
    for (std::int64_t i = 0; i < q.inserts; ++i, ++out.inserts) refresher.insert_into_dim(q.dimension, q.level);
    for (std::int64_t i = 0; i < q.modifies; ++i, ++out.modifies) {
      refresher.modify_dim(q.dimension, q.level, random_key(rng, refresher.size_of(q.table)));
    }
  }
  out.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
  return out;
}

inline RefreshOutcome refresh_facts(const RefreshPlan& plan, Refresher& refresher) {
  RefreshOutcome out;
  const auto start = Clock::now();
  for (const auto& q : plan.facts) {
    for (std::int64_t i = 0; i < q.inserts; ++i, ++out.inserts) refresher.insert_into_ft(q.fact);
    for (std::int64_t i = 0; i < q.modifies; ++i, ++out.modifies) {
      refresher.modify_ft(q.fact, refresher.pick_fact_key(q.fact));
    }
  }
  out.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
  return out;
}

/// One refresh phase: dimensions, then fact tables.
inline RefreshOutcome execute_refresh(const RefreshPlan& plan, const WarehouseSchema& schema, Backend& backend,
                                      SeededRng& rng, const StringReferential& referential) {
  Refresher refresher(schema, backend, rng, referential);
  const auto dims = refresh_dimensions(plan, refresher, rng);
  const auto facts = refresh_facts(plan, refresher);
  return {dims.inserts + facts.inserts, dims.modifies + facts.modifies, dims.duration + facts.duration};
}

}  // namespace dweb
