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

#include <gtest/gtest.h>

#include <set>

#include "dweb/dweb.hpp"
#include "fixtures.hpp"

using namespace dweb;
using dweb::testing::desk_low;
using dweb::testing::schema_for;

namespace {

WarehouseSchema default_schema() {
  HighLevelParams h;
  h.sigma_ratio = 0;
  SeededRng rng(1);
  return schema_for(derive_low_level(h, rng));
}

}  // namespace

TEST(BuildSchema, DefaultShape) {
  const auto s = default_schema();
  ASSERT_EQ(s.fact_tables.size(), 1u);
  ASSERT_EQ(s.dimensions.size(), 5u);
  const auto& ft = s.fact_tables[0];
  EXPECT_EQ(ft.table_name, "FT1");
  EXPECT_EQ(ft.key_attrs.size(), 5u);
  EXPECT_EQ(ft.measures.size(), 5u);
  for (const auto& dim : s.dimensions) {
    ASSERT_EQ(dim.levels.size(), 3u);
    EXPECT_EQ(dim.levels[0].target_cardinality, 1000);
    EXPECT_EQ(dim.levels[1].target_cardinality, 100);
    EXPECT_EQ(dim.levels[2].target_cardinality, 10);
    for (const auto& lvl : dim.levels) EXPECT_EQ(lvl.members.size(), 5u);
  }
}

TEST(BuildSchema, NamesFollowTheStandardPattern) {
  const auto s = default_schema();
  const auto& lvl = s.dimensions[0].levels[0];
  EXPECT_EQ(lvl.table_name, "DIM1_1");
  EXPECT_EQ(lvl.primary_key, "DIM1_1_PK");
  EXPECT_EQ(lvl.members[0], "DIM1_1_DESCR1");
  EXPECT_EQ(lvl.members[4], "DIM1_1_DESCR5");
  ASSERT_TRUE(lvl.foreign_key);
  EXPECT_EQ(*lvl.foreign_key, "DIM1_1_FK");
  EXPECT_FALSE(s.dimensions[0].levels[2].foreign_key);
  EXPECT_EQ(s.fact_tables[0].measures[0], "FT1_MEAS1");
}

TEST(BuildSchema, FactKeysReferenceDistinctFinestLevels) {
  const auto s = default_schema();
  const auto& ft = s.fact_tables[0];
  std::set<std::size_t> refs(ft.dim_refs.begin(), ft.dim_refs.end());
  EXPECT_EQ(refs.size(), ft.dim_refs.size());
  for (std::size_t k = 0; k < ft.dim_refs.size(); ++k) {
    EXPECT_EQ(ft.key_attrs[k], naming::fact_key("FT1", s.dimensions[ft.dim_refs[k]].finest().table_name));
  }
}

TEST(BuildSchema, SingleLevelGivesStarSchema) {
  const auto s = schema_for(desk_low(3, 1, 5, 2, 1.0));
  for (const auto& dim : s.dimensions) {
    ASSERT_EQ(dim.levels.size(), 1u);
    EXPECT_FALSE(dim.levels[0].foreign_key);
    EXPECT_EQ(dim.levels[0].target_cardinality, 5);
  }
  EXPECT_EQ(emit_ddl(s, dialects::sqlite()).size(), 3u + 1u);
}

TEST(BuildSchema, ConstellationSharesAllDimensions) {
  auto low = desk_low(3, 1, 2, 1, 1.0);
  low.nb_ft = 2;
  low.nb_dim = {3, 3};
  low.nb_meas = {1, 1};
  low.density = {1, 1};
  const auto s = schema_for(low);
  ASSERT_EQ(s.fact_tables.size(), 2u);
  for (const auto& ft : s.fact_tables) {
    std::set<std::size_t> refs(ft.dim_refs.begin(), ft.dim_refs.end());
    EXPECT_EQ(refs, (std::set<std::size_t>{0, 1, 2}));
  }
}

TEST(BuildSchema, InvalidParametersRejected) {
  auto low = desk_low(2, 2, 2, 2, 1.0);
  low.density = {1.5};
  SeededRng rng(1);
  EXPECT_THROW(build_schema(low, rng), ConfigError);
}

TEST(LevelCardinality, GrowsBySfactorTowardFinest) {
  EXPECT_EQ(level_cardinality(10, 10, 3, 2), 10);
  EXPECT_EQ(level_cardinality(10, 10, 3, 1), 100);
  EXPECT_EQ(level_cardinality(10, 10, 3, 0), 1000);
}

TEST(EmitDdl, DefaultSnowflakeStatementCountAndOrder) {
  const auto s = default_schema();
  const auto ddl = emit_ddl(s, dialects::sqlite());
  // One statement per level table plus the fact table.
  std::size_t tables = s.fact_tables.size();
  for (const auto& d : s.dimensions) tables += d.levels.size();
  ASSERT_EQ(ddl.size(), tables);
  EXPECT_EQ(ddl.size(), 16u);
  EXPECT_EQ(ddl[0].rfind("CREATE TABLE DIM1_3 ", 0), 0u);
  EXPECT_EQ(ddl[1].rfind("CREATE TABLE DIM1_2 ", 0), 0u);
  EXPECT_EQ(ddl[2].rfind("CREATE TABLE DIM1_1 ", 0), 0u);
  EXPECT_EQ(ddl.back().rfind("CREATE TABLE FT1 ", 0), 0u);
}

TEST(EmitDdl, Deterministic) {
  EXPECT_EQ(emit_ddl(default_schema(), dialects::sqlite()), emit_ddl(default_schema(), dialects::sqlite()));
}

TEST(EmitDdl, MysqlUsesBackticksAndFloat) {
  const auto ddl = emit_ddl(schema_for(desk_low(1, 1, 2, 1, 1.0)), dialects::mysql());
  EXPECT_NE(ddl.back().find("`FT1`"), std::string::npos);
  EXPECT_NE(ddl.back().find("FLOAT"), std::string::npos);
}

TEST(EmitDdl, MissingTypeMappingIsUnsupported) {
  auto d = dialects::ansi();
  d.real_type.clear();
  EXPECT_THROW(emit_ddl(schema_for(desk_low(1, 1, 2, 1, 1.0)), d), UnsupportedDialectError);
}

TEST(EmitDdl, AppliesOnEmbeddedEngine) {
  auto backend = dweb::testing::memory_backend();
  const auto ddl = emit_ddl(default_schema(), backend->dialect());
  EXPECT_EQ(backend->execute_ddl(ddl), 16u);
  EXPECT_EQ(backend->warehouse_tables().size(), 16u);
}

TEST(EstimateSize, FactTableWidthModel) {
  auto low = desk_low(2, 1, 10, 1, 1.0, 1, 2);
  const auto est = estimate_size(schema_for(low));
  const auto fact = std::find_if(est.tables.begin(), est.tables.end(), [](auto& t) { return t.table == "FT1"; });
  ASSERT_NE(fact, est.tables.end());
  EXPECT_DOUBLE_EQ(fact->rows, 100);
  EXPECT_EQ(fact->row_width, 2u * 4u + 2u * 4u);
  EXPECT_DOUBLE_EQ(fact->bytes, 1600);
}

TEST(EstimateSize, DimensionWidthModel) {
  const auto s = schema_for(desk_low(1, 2, 3, 2, 1.0, 1, 1));
  const auto est = estimate_size(s);
  // DIM1_1: key + one member + foreign key; member width is 20 + name length.
  const auto fine = std::find_if(est.tables.begin(), est.tables.end(), [](auto& t) { return t.table == "DIM1_1"; });
  ASSERT_NE(fine, est.tables.end());
  EXPECT_EQ(fine->row_width, 4u + (20u + std::string("DIM1_1_DESCR1").size()) + 4u);
  EXPECT_DOUBLE_EQ(fine->rows, 6);
}

TEST(EstimateSize, DefaultsScaleWithDensity) {
  const auto est = estimate_size(default_schema());
  const auto fact = std::find_if(est.tables.begin(), est.tables.end(), [](auto& t) { return t.table == "FT1"; });
  EXPECT_DOUBLE_EQ(fact->rows, 0.6 * 1e15);
  EXPECT_GT(est.megabytes(), 0);
  EXPECT_FALSE(est.too_large);
}

TEST(EstimateSize, VanishingDensityDrivesFactEstimateToZero) {
  const auto est = estimate_size(schema_for(desk_low(2, 1, 10, 1, 1e-12)));
  const auto fact = std::find_if(est.tables.begin(), est.tables.end(), [](auto& t) { return t.table == "FT1"; });
  EXPECT_LT(fact->bytes, 1e-6);
}
