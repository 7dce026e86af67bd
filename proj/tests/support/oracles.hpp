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

// Independent reference computations used by the test suites. Nothing here
// calls into the library's generators or renderers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "dweb/backend.hpp"
#include "dweb/model.hpp"
#include "dweb/query.hpp"
#include "dweb/value.hpp"

namespace dweb::testing {

struct TableDump {
  std::vector<std::string> columns;
  std::vector<Row> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw std::runtime_error("no column " + name);
  }
};

inline TableDump dump_table(Backend& backend, const std::string& table, const std::vector<std::string>& columns) {
  std::string cols;
  for (std::size_t i = 0; i < columns.size(); ++i) cols += (i ? ", " : "") + columns[i];
  return {columns, backend.query("SELECT " + cols + " FROM " + table)};
}

/// Every table as sorted text lines; equal dumps mean equal contents.
inline std::map<std::string, std::vector<std::string>> sorted_dump(Backend& backend, const WarehouseSchema& schema) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& table : schema.tables_in_dependency_order()) {
    auto dump = dump_table(backend, table, schema.columns_of(table));
    std::vector<std::string> lines;
    for (const auto& row : dump.rows) {
      std::string line;
      for (const auto& v : row) line += to_text(v) + "|";
      lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    out[table] = std::move(lines);
  }
  return out;
}

/// Referential integrity by full scan: unique primary keys, every foreign key
/// found among the referenced keys, unique composite fact keys. Returns the
/// violations found.
inline std::vector<std::string> integrity_violations(Backend& backend, const WarehouseSchema& schema) {
  std::vector<std::string> issues;
  std::map<std::string, std::set<std::int64_t>> keys;
  for (const auto& dim : schema.dimensions) {
    for (const auto& lvl : dim.levels) {
      auto dump = dump_table(backend, lvl.table_name, {lvl.primary_key});
      auto& set = keys[lvl.table_name];
      for (const auto& row : dump.rows) {
        if (!set.insert(std::get<std::int64_t>(row[0])).second) issues.push_back("duplicate key in " + lvl.table_name);
      }
    }
  }
  for (const auto& dim : schema.dimensions) {
    for (std::size_t h = 0; h + 1 < dim.levels.size(); ++h) {
      const auto& lvl = dim.levels[h];
      const auto& target = keys[dim.levels[h + 1].table_name];
      auto dump = dump_table(backend, lvl.table_name, {*lvl.foreign_key});
      for (const auto& row : dump.rows) {
        if (!target.count(std::get<std::int64_t>(row[0]))) issues.push_back("dangling reference in " + lvl.table_name);
      }
    }
  }
  for (const auto& fact : schema.fact_tables) {
    auto dump = dump_table(backend, fact.table_name, fact.key_attrs);
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& row : dump.rows) {
      std::vector<std::int64_t> key;
      for (std::size_t k = 0; k < fact.dim_refs.size(); ++k) {
        const auto v = std::get<std::int64_t>(row[k]);
        if (!keys[schema.dimensions[fact.dim_refs[k]].finest().table_name].count(v)) {
          issues.push_back("dangling reference in " + fact.table_name);
        }
        key.push_back(v);
      }
      if (!seen.insert(key).second) issues.push_back("duplicate composite key in " + fact.table_name);
    }
  }
  return issues;
}

// ---------------------------------------------------------------------------
// Brute-force aggregation over every grouping set
// ---------------------------------------------------------------------------

/// Subsets of {0..k-1} as membership flags: all of them for a cube, the
/// leading prefixes for a rollup, the full set for a plain grouping.
inline std::vector<std::vector<bool>> oracle_grouping_sets(GroupingMode mode, std::size_t k) {
  std::vector<std::vector<bool>> out;
  if (mode == GroupingMode::kCube) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      std::vector<bool> s(k);
      for (std::size_t i = 0; i < k; ++i) s[i] = ((mask >> i) & 1U) != 0;
      out.push_back(s);
    }
  } else if (mode == GroupingMode::kRollup) {
    for (std::size_t len = 0; len <= k; ++len) {
      std::vector<bool> s(k, false);
      std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(len), true);
      out.push_back(s);
    }
  } else if (mode == GroupingMode::kPlain) {
    out.emplace_back(k, true);
  }
  return out;
}

namespace detail {

inline bool satisfies(const Value& v, CompareOp op, const Operand& operand) {
  if (is_null(v)) return false;
  if (const auto* list = std::get_if<std::vector<std::string>>(&operand)) {
    const auto* s = std::get_if<std::string>(&v);
    return s && std::find(list->begin(), list->end(), *s) != list->end();
  }
  int cmp = 0;
  if (const auto* s = std::get_if<std::string>(&operand)) {
    const auto* x = std::get_if<std::string>(&v);
    if (!x) return false;
    cmp = x->compare(*s);
  } else {
    const double rhs = std::get<double>(operand);
    const double lhs = std::holds_alternative<double>(v) ? std::get<double>(v)
                                                          : static_cast<double>(std::get<std::int64_t>(v));
    cmp = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  switch (op) {
    case CompareOp::kEq: return cmp == 0;
    case CompareOp::kNe: return cmp != 0;
    case CompareOp::kLt: return cmp < 0;
    case CompareOp::kLe: return cmp <= 0;
    case CompareOp::kGt: return cmp > 0;
    case CompareOp::kGe: return cmp >= 0;
    case CompareOp::kIn: return false;
  }
  return false;
}

inline bool compare_number(double lhs, CompareOp op, double rhs) {
  switch (op) {
    case CompareOp::kEq: return lhs == rhs;
    case CompareOp::kNe: return lhs != rhs;
    case CompareOp::kLt: return lhs < rhs;
    case CompareOp::kLe: return lhs <= rhs;
    case CompareOp::kGt: return lhs > rhs;
    case CompareOp::kGe: return lhs >= rhs;
    case CompareOp::kIn: return false;
  }
  return false;
}

inline double as_double(const Value& v) {
  return std::holds_alternative<double>(v) ? std::get<double>(v) : static_cast<double>(std::get<std::int64_t>(v));
}

}  // namespace detail

/// Evaluates an aggregate query in memory: joins the dumped tables along the
/// join conditions, filters, then aggregates every grouping set separately.
/// Rows come out as select attributes (NULL when outside the set) followed by
/// the sums (NULL over an empty input).
inline std::vector<Row> evaluate_grouping_query(Backend& backend, const WarehouseSchema& schema, const QueryAst& q) {
  std::map<std::string, TableDump> dumps;
  for (const auto& t : q.tables) dumps[t] = dump_table(backend, t, schema.columns_of(t));

  // Joined tuples as one row index per table.
  using Binding = std::map<std::string, std::size_t>;
  std::vector<Binding> tuples;
  for (std::size_t i = 0; i < dumps[q.tables.front()].rows.size(); ++i) tuples.push_back({{q.tables.front(), i}});
  std::set<std::string> bound{q.tables.front()};
  std::vector<JoinCond> pending(q.join_conds.begin(), q.join_conds.end());
  while (!pending.empty()) {
    auto it = std::find_if(pending.begin(), pending.end(),
                           [&](const JoinCond& j) { return bound.count(j.left.table) || bound.count(j.right.table); });
    if (it == pending.end()) throw std::runtime_error("disconnected join graph");
    auto j = *it;
    pending.erase(it);
    if (!bound.count(j.left.table)) std::swap(j.left, j.right);
    const auto& ldump = dumps[j.left.table];
    const auto& rdump = dumps[j.right.table];
    const auto lcol = ldump.column(j.left.column);
    const auto rcol = rdump.column(j.right.column);
    if (bound.count(j.right.table)) {
      std::vector<Binding> kept;
      for (auto& b : tuples) {
        if (to_text(ldump.rows[b[j.left.table]][lcol]) == to_text(rdump.rows[b[j.right.table]][rcol])) kept.push_back(b);
      }
      tuples = std::move(kept);
      continue;
    }
    std::unordered_multimap<std::string, std::size_t> index;
    for (std::size_t r = 0; r < rdump.rows.size(); ++r) index.emplace(to_text(rdump.rows[r][rcol]), r);
    std::vector<Binding> next;
    for (const auto& b : tuples) {
      auto [lo, hi] = index.equal_range(to_text(ldump.rows[b.at(j.left.table)][lcol]));
      for (auto m = lo; m != hi; ++m) {
        auto nb = b;
        nb[j.right.table] = m->second;
        next.push_back(std::move(nb));
      }
    }
    tuples = std::move(next);
    bound.insert(j.right.table);
  }

  auto cell = [&](const Binding& b, const AttributeRef& a) -> const Value& {
    const auto& d = dumps.at(a.table);
    return d.rows[b.at(a.table)][d.column(a.column)];
  };

  std::vector<Binding> filtered;
  for (const auto& b : tuples) {
    bool ok = true;
    for (const auto& r : q.restrictions) ok = ok && detail::satisfies(cell(b, r.attribute), r.op, r.operand);
    if (ok) filtered.push_back(b);
  }

  std::vector<Row> result;
  for (const auto& set : oracle_grouping_sets(q.grouping, q.group_by.size())) {
    // Group key: text of present attributes.
    std::map<std::vector<std::string>, std::pair<Row, std::vector<double>>> groups;
    for (const auto& b : filtered) {
      std::vector<std::string> key;
      Row head;
      for (std::size_t i = 0; i < q.group_by.size(); ++i) {
        if (set[i]) {
          key.push_back(to_text(cell(b, q.group_by[i])));
          head.push_back(cell(b, q.group_by[i]));
        } else {
          head.emplace_back(std::monostate{});
        }
      }
      auto& g = groups[key];
      if (g.second.empty()) {
        g.first = head;
        g.second.assign(q.aggregates.size(), 0.0);
      }
      for (std::size_t a = 0; a < q.aggregates.size(); ++a) g.second[a] += detail::as_double(cell(b, q.aggregates[a].measure));
    }
    const bool grand_total = std::none_of(set.begin(), set.end(), [](bool x) { return x; });
    if (grand_total && groups.empty()) {
      Row row(q.group_by.size(), Value{});
      row.resize(q.group_by.size() + q.aggregates.size(), Value{});
      if (!q.having) result.push_back(std::move(row));
      continue;
    }
    for (auto& [key, g] : groups) {
      if (q.having && !detail::compare_number(g.second[q.having->aggregate], q.having->op, q.having->value)) continue;
      Row row = g.first;
      for (double s : g.second) row.emplace_back(s);
      result.push_back(std::move(row));
    }
  }
  return result;
}

/// Multiset equality; doubles within a relative tolerance.
inline bool same_rows(std::vector<Row> a, std::vector<Row> b, double rel_tol, std::string* why = nullptr) {
  if (a.size() != b.size()) {
    if (why) *why = "row counts " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    return false;
  }
  auto key_of = [](const Row& r) {
    std::vector<std::string> k;
    for (const auto& v : r) k.push_back(std::holds_alternative<double>(v) ? std::string("#") : to_text(v));
    return k;
  };
  auto less = [&](const Row& x, const Row& y) {
    const auto kx = key_of(x), ky = key_of(y);
    if (kx != ky) return kx < ky;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::holds_alternative<double>(x[i]) && std::holds_alternative<double>(y[i]) &&
          std::get<double>(x[i]) != std::get<double>(y[i])) {
        return std::get<double>(x[i]) < std::get<double>(y[i]);
      }
    }
    return false;
  };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != b[r].size() || key_of(a[r]) != key_of(b[r])) {
      if (why) *why = "row " + std::to_string(r) + " differs";
      return false;
    }
    for (std::size_t i = 0; i < a[r].size(); ++i) {
      if (!std::holds_alternative<double>(a[r][i])) continue;
      const double x = std::get<double>(a[r][i]);
      const double y = std::get<double>(b[r][i]);
      if (std::fabs(x - y) > rel_tol * std::max({1.0, std::fabs(x), std::fabs(y)})) {
        if (why) *why = "row " + std::to_string(r) + " sum " + format_real(x) + " vs " + format_real(y);
        return false;
      }
    }
  }
  return true;
}

}  // namespace dweb::testing
