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
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dweb/dialect.hpp"
#include "dweb/error.hpp"
#include "dweb/query.hpp"
#include "dweb/value.hpp"

namespace dweb {

/// CUBE over more attributes than this is not expanded (2^16 branches).
inline constexpr std::size_t kMaxExpandedCubeAttributes = 16;

/// Grouping sets of a grouping operator, as membership masks over the
/// attribute list. CUBE yields all 2^k subsets, ROLLUP the k+1 prefixes,
/// both from the full set down to the empty set.
inline std::vector<std::vector<bool>> grouping_sets(GroupingMode mode, std::size_t k) {
  std::vector<std::vector<bool>> sets;
  switch (mode) {
    case GroupingMode::kCube: {
      if (k > kMaxExpandedCubeAttributes) {
        throw UnsupportedDialectError("CUBE over " + std::to_string(k) + " attributes cannot be expanded");
      }
      const std::uint64_t n = std::uint64_t{1} << k;
      for (std::uint64_t mask = n; mask-- > 0;) {
        std::vector<bool> s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = (mask >> (k - 1 - i)) & 1U;
        sets.push_back(std::move(s));
      }
      break;
    }
    case GroupingMode::kRollup:
      for (std::size_t len = k + 1; len-- > 0;) {
        std::vector<bool> s(k, false);
        for (std::size_t i = 0; i < len; ++i) s[i] = true;
        sets.push_back(std::move(s));
      }
      break;
    case GroupingMode::kPlain:
      sets.emplace_back(k, true);
      break;
    case GroupingMode::kNone:
      break;
  }
  return sets;
}

namespace detail {

class SqlRenderer {
 public:
  SqlRenderer(const QueryAst& q, const DialectDescriptor& d) : q_(q), d_(d) {}

  std::string render() const {
    if (q_.grouping == GroupingMode::kNone) return select_list(nullptr) + from_where();
    const bool native = q_.grouping == GroupingMode::kPlain ||
                        (q_.grouping == GroupingMode::kCube && d_.supports_cube) ||
                        (q_.grouping == GroupingMode::kRollup && d_.supports_rollup);
    if (native) return select_list(nullptr) + from_where() + native_group_by() + having();
    return expansion();
  }

 private:
  std::string ref(const AttributeRef& a) const { return d_.identifier(a.table) + "." + d_.identifier(a.column); }

  std::string aggregate_expr(const Aggregate& a) const { return a.function + "(" + ref(a.measure) + ")"; }

  std::string attr_list(const std::vector<AttributeRef>& attrs) const {
    std::string s;
    for (std::size_t i = 0; i < attrs.size(); ++i) s += (i ? ", " : "") + ref(attrs[i]);
    return s;
  }

  /// `present` masks grouping attributes; absent ones become NULL.
  std::string select_list(const std::vector<bool>* present) const {
    std::string s = "SELECT ";
    bool first = true;
    for (std::size_t i = 0; i < q_.select_attrs.size(); ++i) {
      s += first ? "" : ", ";
      first = false;
      s += (present && !(*present)[i]) ? std::string("NULL") : ref(q_.select_attrs[i]);
    }
    for (const auto& a : q_.aggregates) {
      s += first ? "" : ", ";
      first = false;
      s += aggregate_expr(a) + " AS " + d_.identifier(a.alias);
    }
    return s;
  }

  std::string operand(const Operand& op) const {
    struct Visitor {
      std::string operator()(const std::string& s) const { return quote_string(s); }
      std::string operator()(double v) const { return format_real(v); }
      std::string operator()(const std::vector<std::string>& list) const {
        std::string out = "(";
        for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ", " : "") + quote_string(list[i]);
        return out + ")";
      }
    };
    return std::visit(Visitor{}, op);
  }

  std::string from_where() const {
    std::string s = " FROM ";
    for (std::size_t i = 0; i < q_.tables.size(); ++i) s += (i ? ", " : "") + d_.identifier(q_.tables[i]);
    std::vector<std::string> conds;
    for (const auto& j : q_.join_conds) conds.push_back(ref(j.left) + " = " + ref(j.right));
    for (const auto& r : q_.restrictions) {
      conds.push_back(ref(r.attribute) + " " + std::string(to_sql(r.op)) + " " + operand(r.operand));
    }
    if (!conds.empty()) {
      s += " WHERE ";
      for (std::size_t i = 0; i < conds.size(); ++i) s += (i ? " AND " : "") + conds[i];
    }
    return s;
  }

  std::string native_group_by() const {
    switch (q_.grouping) {
      case GroupingMode::kCube: return " GROUP BY CUBE(" + attr_list(q_.group_by) + ")";
      case GroupingMode::kRollup: return " GROUP BY ROLLUP(" + attr_list(q_.group_by) + ")";
      case GroupingMode::kPlain: return " GROUP BY " + attr_list(q_.group_by);
      case GroupingMode::kNone: break;
    }
    return {};
  }

  std::string having_lhs() const {
    const auto& agg = q_.aggregates.at(q_.having->aggregate);
    return d_.supports_having_alias ? d_.identifier(agg.alias) : aggregate_expr(agg);
  }

  std::string having_tail() const {
    return " " + std::string(to_sql(q_.having->op)) + " " + format_real(q_.having->value);
  }

  std::string having() const {
    if (!q_.having) return {};
    return " HAVING " + having_lhs() + having_tail();
  }

  std::string branch(const std::vector<bool>& present) const {
    std::vector<AttributeRef> keys;
    for (std::size_t i = 0; i < q_.group_by.size(); ++i) {
      if (present[i]) keys.push_back(q_.group_by[i]);
    }
    std::string body = select_list(&present) + from_where();
    if (!keys.empty()) return body + " GROUP BY " + attr_list(keys) + having();
    if (!q_.having) return body;
    if (d_.supports_having_without_group_by) return body + having();
    // Grand total with a HAVING filter, as a filtered derived table.
    const auto& agg = q_.aggregates.at(q_.having->aggregate);
    return "SELECT * FROM (" + body + ") AS " + d_.identifier("GRAND_TOTAL") + " WHERE " + d_.identifier(agg.alias) +
           having_tail();
  }

  std::string expansion() const {
    std::vector<std::string> branches;
    for (const auto& set : grouping_sets(q_.grouping, q_.group_by.size())) branches.push_back(branch(set));
    const std::size_t limit = d_.max_compound_select;
    if (limit == 0 || branches.size() <= limit) return join_union(branches, 0, branches.size());
    // Nest chunks in derived tables to stay under the compound-select limit.
    const std::size_t chunk = limit / 2;
    std::string s;
    for (std::size_t start = 0, n = 0; start < branches.size(); start += chunk, ++n) {
      const std::size_t end = std::min(branches.size(), start + chunk);
      s += (start ? " UNION ALL " : "") + std::string("SELECT * FROM (") + join_union(branches, start, end) + ") AS " +
           d_.identifier("PART" + std::to_string(n + 1));
    }
    return s;
  }

  static std::string join_union(const std::vector<std::string>& parts, std::size_t begin, std::size_t end) {
    std::string s;
    for (std::size_t i = begin; i < end; ++i) s += (i > begin ? " UNION ALL " : "") + parts[i];
    return s;
  }

  const QueryAst& q_;
  const DialectDescriptor& d_;
};

}  // namespace detail

/// SQL text for a query. Dialects without native CUBE/ROLLUP receive the
/// equivalent UNION ALL over every grouping set, with absent grouping
/// attributes padded by NULL.
inline std::string render_sql(const QueryAst& q, const DialectDescriptor& dialect) {
  return detail::SqlRenderer(q, dialect).render();
}

}  // namespace dweb
