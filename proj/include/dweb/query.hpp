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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dweb/error.hpp"

namespace dweb {

enum class QueryKind { kOlap, kExtraction };
enum class GroupingMode { kNone, kPlain, kCube, kRollup };
enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe, kIn };

inline std::string_view to_sql(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "<>";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
    case CompareOp::kIn: return "IN";
  }
  return "=";
}

inline std::string_view to_string(QueryKind k) { return k == QueryKind::kOlap ? "OLAP" : "EXTRACTION"; }

struct AttributeRef {
  std::string table;
  std::string column;

  std::string qualified() const { return table + "." + column; }

  auto operator<=>(const AttributeRef&) const = default;
};

/// left = right; the generator always puts the referencing key on the left.
struct JoinCond {
  AttributeRef left;
  AttributeRef right;

  bool operator==(const JoinCond&) const = default;
};

/// String literal, numeric literal, or value list (for IN).
using Operand = std::variant<std::string, double, std::vector<std::string>>;

struct Restriction {
  AttributeRef attribute;
  CompareOp op = CompareOp::kEq;
  Operand operand;

  bool operator==(const Restriction&) const = default;
};

struct Aggregate {
  std::string function = "SUM";
  AttributeRef measure;
  std::string alias;

  bool operator==(const Aggregate&) const = default;
};

struct Having {
  std::size_t aggregate = 0;  // index into QueryAst::aggregates
  CompareOp op = CompareOp::kGe;
  double value = 0;

  bool operator==(const Having&) const = default;
};

/// One workload query. tables[0] is the fact table.
struct QueryAst {
  std::vector<AttributeRef> select_attrs;
  std::vector<Aggregate> aggregates;
  std::vector<std::string> tables;
  std::vector<JoinCond> join_conds;
  std::vector<Restriction> restrictions;
  GroupingMode grouping = GroupingMode::kNone;
  std::vector<AttributeRef> group_by;
  std::optional<Having> having;
  QueryKind kind = QueryKind::kExtraction;
  std::size_t drill_depth = 0;

  bool operator==(const QueryAst&) const = default;
};

/// Structural invariants; returns one message per violation.
inline std::vector<std::string> check_query(const QueryAst& q) {
  std::vector<std::string> issues;
  if (q.tables.empty()) issues.push_back("no tables");
  if (q.select_attrs.empty() && q.aggregates.empty()) issues.push_back("empty select list");
  if (q.kind == QueryKind::kExtraction) {
    if (!q.aggregates.empty()) issues.push_back("extraction query with aggregates");
    if (q.grouping != GroupingMode::kNone || !q.group_by.empty()) issues.push_back("extraction query with GROUP BY");
    if (q.having) issues.push_back("extraction query with HAVING");
  } else {
    if (q.aggregates.empty()) issues.push_back("OLAP query without aggregates");
    if (q.group_by != q.select_attrs) issues.push_back("GROUP BY list differs from selected attributes");
  }
  if (q.having && q.having->aggregate >= q.aggregates.size()) issues.push_back("HAVING references missing aggregate");

  // Join graph rooted at the fact table must reach every table.
  if (!q.tables.empty()) {
    std::set<std::string> reached{q.tables.front()};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& j : q.join_conds) {
        const bool l = reached.count(j.left.table) > 0;
        const bool r = reached.count(j.right.table) > 0;
        if (l != r) {
          reached.insert(l ? j.right.table : j.left.table);
          grew = true;
        }
      }
    }
    for (const auto& t : q.tables) {
      if (!reached.count(t)) issues.push_back("table " + t + " not joined to " + q.tables.front());
    }
  }
  auto in_from = [&](const AttributeRef& a) {
    return std::find(q.tables.begin(), q.tables.end(), a.table) != q.tables.end();
  };
  for (const auto& a : q.select_attrs) {
    if (!in_from(a)) issues.push_back("attribute " + a.qualified() + " not in FROM");
  }
  for (const auto& r : q.restrictions) {
    if (!in_from(r.attribute)) issues.push_back("restriction on " + r.attribute.qualified() + " not in FROM");
  }
  return issues;
}

}  // namespace dweb
