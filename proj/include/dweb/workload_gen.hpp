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
#include <string>
#include <vector>

#include "dweb/error.hpp"
#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/query.hpp"
#include "dweb/random.hpp"

namespace dweb {

struct Workload {
  std::vector<QueryAst> queries;
  WorkloadParams params;
  double sigma_ratio = 0.2;
  std::uint64_t seed = 0;

  bool operator==(const Workload&) const = default;
};

/// Everything query generation draws on besides the random stream.
struct WorkloadContext {
  const WorkloadParams& params;
  const WarehouseSchema& schema;
  const StringReferential& referential;
  double sigma_ratio = 0.2;
};

namespace detail {

template <class T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

/// Appends `a`; if already present it moves to the end instead, so the last
/// element always names the level most recently navigated.
inline void append_attribute(std::vector<AttributeRef>& list, AttributeRef a) {
  list.erase(std::remove(list.begin(), list.end(), a), list.end());
  list.push_back(std::move(a));
}

}  // namespace detail

/// Initial query: picks a fact table, navigates dimension hierarchies to pick
/// attributes, adds equality restrictions, then decides OLAP vs extraction.
inline QueryAst build_initial_query(const WorkloadContext& ctx, SeededRng& rng) {
  const auto& schema = ctx.schema;
  const auto& params = ctx.params;
  if (schema.fact_tables.empty()) throw Error("build_initial_query: schema has no fact table");
  const auto& fact = schema.fact_tables[gaussian_index(rng, schema.fact_tables.size())];

  QueryAst q;
  q.tables.push_back(fact.table_name);

  // Select, From and Where clauses
  const auto nb_att = gauss_int(rng, params.q_avg_nb_att, ctx.sigma_ratio);
  for (std::int64_t k = 0; k < nb_att; ++k) {
    const std::size_t slot = gaussian_index(rng, fact.dim_refs.size());
    const auto& dim = schema.dimensions.at(fact.dim_refs[slot]);
    const auto depth = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<std::int64_t>(dim.levels.size())));

    // Join fact -> level 1 -> ... -> level `depth`.
    AttributeRef fk{fact.table_name, fact.key_attrs[slot]};
    for (std::size_t h = 0; h < depth; ++h) {
      const auto& lvl = dim.levels[h];
      if (!detail::contains(q.tables, lvl.table_name)) q.tables.push_back(lvl.table_name);
      JoinCond join{fk, {lvl.table_name, lvl.primary_key}};
      if (!detail::contains(q.join_conds, join)) q.join_conds.push_back(std::move(join));
      if (lvl.foreign_key) fk = {lvl.table_name, *lvl.foreign_key};
    }
    const auto& target = dim.levels[depth - 1];
    detail::append_attribute(q.select_attrs,
                             {target.table_name, target.members[gaussian_index(rng, target.members.size())]});
  }

  // Supplement Where clause
  const auto nb_restr = gauss_int(rng, params.avg_nb_restr, ctx.sigma_ratio);
  for (std::int64_t k = 0; k < nb_restr; ++k) {
    const auto& attr = q.select_attrs[gaussian_index(rng, q.select_attrs.size())];
    q.restrictions.push_back({attr, CompareOp::kEq, random_string(rng, ctx.referential, attr.column)});
  }

  // OLAP or extraction
  if (uniform_float(rng, 0.0, 1.0) < params.prob_olap) {
    q.kind = QueryKind::kOlap;
    const auto nb_aggreg = gauss_int(rng, params.avg_nb_aggreg, ctx.sigma_ratio);
    std::vector<AttributeRef> measures;
    for (std::int64_t k = 0; k < nb_aggreg; ++k) {
      AttributeRef m{fact.table_name, fact.measures[gaussian_index(rng, fact.measures.size())]};
      if (!detail::contains(measures, m)) measures.push_back(std::move(m));
    }
    for (std::size_t k = 0; k < measures.size(); ++k) {
      q.aggregates.push_back({"SUM", measures[k], "AGG" + std::to_string(k + 1)});
    }
    q.group_by = q.select_attrs;
    q.grouping = uniform_float(rng, 0.0, 1.0) < params.prob_cube ? GroupingMode::kCube : GroupingMode::kRollup;
    if (uniform_float(rng, 0.0, 1.0) < params.prob_having) {
      const auto agg = gaussian_index(rng, q.aggregates.size());
      q.having = Having{agg, CompareOp::kGe, uniform_float(rng, 0.0, 100.0)};
    }
  } else {
    q.kind = QueryKind::kExtraction;
  }
  return q;
}

/// Successive drill-downs along the dimension navigated last in `q`: each
/// variant adds one attribute of the next-finer level to the select and
/// GROUP BY lists.
inline std::vector<QueryAst> derive_drilldowns(const QueryAst& q, const WorkloadContext& ctx, SeededRng& rng) {
  std::vector<QueryAst> out;
  if (q.kind != QueryKind::kOlap || q.select_attrs.empty()) return out;
  auto cursor = ctx.schema.find_level(q.select_attrs.back().table);
  if (!cursor) return out;
  const auto& dim = ctx.schema.dimensions.at(cursor->dimension);

  const auto limit = gauss_int(rng, ctx.params.avg_nb_dd, ctx.sigma_ratio);
  QueryAst current = q;
  std::size_t level = cursor->level;
  for (std::int64_t k = 0; k < limit; ++k) {
    const auto finer = dim.finer_link(level);
    if (!finer) break;
    level = *finer;
    const auto& lvl = dim.levels[level];
    std::vector<AttributeRef> fresh;
    for (const auto& m : lvl.members) {
      AttributeRef a{lvl.table_name, m};
      if (!detail::contains(current.select_attrs, a)) fresh.push_back(std::move(a));
    }
    if (fresh.empty()) break;
    auto att = fresh[gaussian_index(rng, fresh.size())];
    current.select_attrs.push_back(att);
    current.group_by.push_back(att);
    current.drill_depth += 1;
    out.push_back(current);
  }
  return out;
}

/// Generates queries until at least nb_q exist; each OLAP initial query is
/// followed by its drill-down chain.
inline Workload generate_workload(const WorkloadContext& ctx, SeededRng& rng) {
  Workload w;
  w.params = ctx.params;
  w.sigma_ratio = ctx.sigma_ratio;
  w.seed = rng.seed();
  while (w.queries.size() < ctx.params.nb_q) {
    auto q = build_initial_query(ctx, rng);
    auto drills = derive_drilldowns(q, ctx, rng);
    w.queries.push_back(std::move(q));
    for (auto& d : drills) w.queries.push_back(std::move(d));
  }
  return w;
}

/// Same, on the workload stream derived from a master seed (recorded in the result).
inline Workload generate_workload(const WorkloadContext& ctx, std::uint64_t master_seed) {
  SeededRng rng = SeededRng(master_seed).substream(stream::kWorkload);
  Workload w = generate_workload(ctx, rng);
  w.seed = master_seed;
  return w;
}

}  // namespace dweb
