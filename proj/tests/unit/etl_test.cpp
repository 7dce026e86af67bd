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
#include "oracles.hpp"

using namespace dweb;
using namespace dweb::testing;

namespace {

WarehouseStats synthetic_stats(const WarehouseSchema& schema, std::int64_t global) {
  WarehouseStats stats;
  const auto tables = schema.tables_in_dependency_order();
  for (std::size_t i = 0; i < tables.size(); ++i) {
    stats.tables.push_back({tables[i], i + 1 == tables.size() ? global - static_cast<std::int64_t>(tables.size()) + 1 : 1});
  }
  return stats;
}

class LoadedWarehouse : public ::testing::Test {
 protected:
  void init(const LowLevelParams& low) {
    schema_ = schema_for(low);
    backend_ = memory_backend();
    load_into(*backend_, schema_, ref_);
  }
  bool fact_exists(const std::vector<std::int64_t>& key) {
    const auto& fact = schema_.fact_tables[0];
    std::string sql = "SELECT 1 FROM FT1 WHERE ";
    for (std::size_t k = 0; k < key.size(); ++k) {
      sql += (k ? " AND " : "") + fact.key_attrs[k] + " = " + std::to_string(key[k]);
    }
    return !backend_->query(sql).empty();
  }

  WarehouseSchema schema_;
  StringReferential ref_ = referential_for();
  std::unique_ptr<SqliteBackend> backend_;
  SeededRng rng_{17};
};

}  // namespace

TEST(PlanRefresh, QuotasFollowTheDefaultRates) {
  const auto schema = schema_for(desk_low(5, 3, 2, 2, 0.5));
  SeededRng rng(1);
  const auto plan = plan_refresh(EtlParams{}, synthetic_stats(schema, 10000), schema, rng);
  ASSERT_EQ(plan.levels.size(), 15u);
  ASSERT_EQ(plan.facts.size(), 1u);
  // 10000 * 0.01 * 0.05 * 0.95 / 5 / 3 and 10000 * 0.01 * 0.95 * 0.95
  const double dim_quota = 10000 * 0.01 * 0.05 * 0.95 / 5 / 3;
  for (const auto& l : plan.levels) {
    EXPECT_NEAR(l.insert_quota, 0.316667, 1e-6);
    EXPECT_NEAR(l.insert_quota, dim_quota, 1e-12);
    EXPECT_TRUE(l.inserts == 0 || l.inserts == 1);
  }
  EXPECT_NEAR(plan.facts[0].insert_quota, 90.25, 1e-9);
  EXPECT_NEAR(plan.facts[0].modify_quota, 4.75, 1e-9);
  EXPECT_TRUE(plan.facts[0].inserts == 90 || plan.facts[0].inserts == 91);
  EXPECT_EQ(plan.levels[0].table, "DIM1_3");
  EXPECT_EQ(plan.levels[2].table, "DIM1_1");
}

TEST(PlanRefresh, ZeroGrowthMeansNoOperations) {
  const auto schema = schema_for(desk_low(3, 2, 2, 2, 0.5));
  SeededRng rng(1);
  EtlParams p;
  p.grr = 0;
  EXPECT_TRUE(plan_refresh(p, synthetic_stats(schema, 5000), schema, rng).empty());
}

TEST(PlanRefresh, EmptyWarehouseIsAPrecondition) {
  const auto schema = schema_for(desk_low(1, 1, 2, 1, 0.5));
  SeededRng rng(1);
  EXPECT_THROW(plan_refresh(EtlParams{}, synthetic_stats(schema, 0), schema, rng), PreconditionError);
}

TEST(PlanRefresh, MeanOperationCountMatchesQuota) {
  const auto schema = schema_for(desk_low(5, 3, 2, 2, 0.5));
  const auto stats = synthetic_stats(schema, 10000);
  SeededRng rng(2);
  double total = 0;
  for (int i = 0; i < 100; ++i) total += static_cast<double>(plan_refresh(EtlParams{}, stats, schema, rng).total_operations());
  EXPECT_NEAR(total / 100, 100.0, 5.0);
}

TEST(RealizeQuota, StochasticRounding) {
  SeededRng rng(3);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto n = realize_quota(2.25, rng);
    ASSERT_TRUE(n == 2 || n == 3);
    sum += static_cast<double>(n);
  }
  EXPECT_NEAR(sum / 10000, 2.25, 0.02);
  EXPECT_EQ(realize_quota(0, rng), 0);
  EXPECT_EQ(realize_quota(4, rng), 4);
}

TEST_F(LoadedWarehouse, DimensionInsertTakesNextKeyAndValidParent) {
  init(desk_low(2, 2, 10, 2, 0.5));
  ASSERT_EQ(count_rows(*backend_, "DIM1_2"), 10);
  Refresher r(schema_, *backend_, rng_, ref_);
  EXPECT_EQ(r.insert_into_dim(0, 1), 11);
  EXPECT_EQ(r.insert_into_dim(0, 1), 12);
  const auto key = r.insert_into_dim(0, 0);
  EXPECT_EQ(key, 21);
  const auto rows = backend_->query("SELECT DIM1_1_FK FROM DIM1_1 WHERE DIM1_1_PK = 21");
  ASSERT_EQ(rows.size(), 1u);
  const auto parent = std::get<std::int64_t>(rows[0][0]);
  EXPECT_GE(parent, 1);
  EXPECT_LE(parent, 12);
  EXPECT_TRUE(integrity_violations(*backend_, schema_).empty());
}

TEST_F(LoadedWarehouse, FactInsertUsesUnusedKey) {
  init(desk_low(2, 1, 6, 1, 0.5));
  Refresher r(schema_, *backend_, rng_, ref_);
  std::set<std::vector<std::int64_t>> seen;
  for (int i = 0; i < 5; ++i) {
    const auto before = count_rows(*backend_, "FT1");
    std::vector<std::int64_t> key;
    try {
      key = r.insert_into_ft(0);
    } catch (const SaturationError&) {
      break;
    }
    EXPECT_TRUE(seen.insert(key).second);
    EXPECT_TRUE(fact_exists(key));
    EXPECT_EQ(count_rows(*backend_, "FT1"), before + 1);
  }
  EXPECT_FALSE(seen.empty());
  const auto rows = backend_->query("SELECT MIN(FT1_MEAS1), MAX(FT1_MEAS1) FROM FT1");
  EXPECT_GE(std::get<double>(rows[0][0]), 0.0);
  EXPECT_LT(std::get<double>(rows[0][1]), 100.0);
  EXPECT_TRUE(integrity_violations(*backend_, schema_).empty());
}

TEST_F(LoadedWarehouse, FullFactTableSaturates) {
  init(desk_low(2, 1, 4, 1, 1.0));
  ASSERT_EQ(count_rows(*backend_, "FT1"), 16);
  Refresher r(schema_, *backend_, rng_, ref_);
  EXPECT_THROW(r.insert_into_ft(0), SaturationError);
  EXPECT_EQ(count_rows(*backend_, "FT1"), 16);
}

TEST_F(LoadedWarehouse, ModifyDimensionKeepsKeys) {
  init(desk_low(1, 2, 4, 2, 0.5));
  const auto before = backend_->query("SELECT DIM1_1_PK, DIM1_1_FK FROM DIM1_1 ORDER BY DIM1_1_PK");
  Refresher r(schema_, *backend_, rng_, ref_);
  const auto values = r.modify_dim(0, 0, 3);
  ASSERT_EQ(values.size(), 2u);
  const auto row = backend_->query("SELECT DIM1_1_DESCR1, DIM1_1_DESCR2 FROM DIM1_1 WHERE DIM1_1_PK = 3");
  EXPECT_EQ(std::get<std::string>(row.at(0)[0]), values[0]);
  EXPECT_EQ(std::get<std::string>(row.at(0)[1]), values[1]);
  EXPECT_EQ(backend_->query("SELECT DIM1_1_PK, DIM1_1_FK FROM DIM1_1 ORDER BY DIM1_1_PK"), before);
}

TEST_F(LoadedWarehouse, ModifyFactRewritesMeasures) {
  init(desk_low(2, 1, 5, 1, 0.5));
  Refresher r(schema_, *backend_, rng_, ref_);
  const auto key = r.pick_fact_key(0);
  ASSERT_EQ(key.size(), 2u);
  const auto values = r.modify_ft(0, key);
  ASSERT_EQ(values.size(), 2u);
  const auto row = backend_->query("SELECT FT1_MEAS1, FT1_MEAS2 FROM FT1 WHERE " + schema_.fact_tables[0].key_attrs[0] +
                                   " = " + std::to_string(key[0]) + " AND " + schema_.fact_tables[0].key_attrs[1] +
                                   " = " + std::to_string(key[1]));
  ASSERT_EQ(row.size(), 1u);
  EXPECT_DOUBLE_EQ(std::get<double>(row[0][0]), values[0]);
  EXPECT_DOUBLE_EQ(std::get<double>(row[0][1]), values[1]);
}

TEST_F(LoadedWarehouse, ManyModificationsKeepIntegrity) {
  init(desk_low(3, 2, 3, 2, 0.5));
  const auto dump = sorted_dump(*backend_, schema_);
  Refresher r(schema_, *backend_, rng_, ref_);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = static_cast<std::size_t>(i % 3);
    const std::size_t level = static_cast<std::size_t>(i % 2);
    r.modify_dim(d, level, random_key(rng_, r.size_of(naming::level_table(d, level))));
    r.modify_ft(0, r.pick_fact_key(0));
  }
  EXPECT_TRUE(integrity_violations(*backend_, schema_).empty());
  const auto after = sorted_dump(*backend_, schema_);
  for (const auto& [table, rows] : dump) EXPECT_EQ(after.at(table).size(), rows.size()) << table;
}

TEST_F(LoadedWarehouse, StaleKeyRetriesOnce) {
  init(desk_low(1, 1, 4, 1, 0.5));
  Refresher r(schema_, *backend_, rng_, ref_);
  EXPECT_NO_THROW(r.modify_dim(0, 0, 999));
  EXPECT_NO_THROW(r.modify_ft(0, {999}));
  EXPECT_EQ(count_rows(*backend_, "DIM1_1"), 4);
}

TEST_F(LoadedWarehouse, MissingRowsRaiseStaleKey) {
  init(desk_low(1, 1, 4, 1, 0.5));
  Refresher r(schema_, *backend_, rng_, ref_);
  EXPECT_EQ(r.size_of("DIM1_1"), 4);
  backend_->execute("DELETE FROM FT1");
  backend_->execute("DELETE FROM DIM1_1");
  EXPECT_THROW(r.modify_dim(0, 0, 2), StaleKeyError);
}

TEST_F(LoadedWarehouse, InsertOnlyPlanIssuesNoUpdate) {
  init(desk_low(2, 2, 4, 2, 0.5));
  RecordingBackend recorder(*backend_);
  EtlParams p;
  p.grr = 0.2;
  p.ir = 1.0;
  SeededRng plan_rng(4);
  const auto plan = plan_refresh(p, backend_->warehouse_stats(schema_), schema_, plan_rng);
  ASSERT_GT(plan.total_operations(), 0);
  const auto outcome = execute_refresh(plan, schema_, recorder, rng_, ref_);
  EXPECT_EQ(recorder.count_prefix("UPDATE"), 0u);
  EXPECT_EQ(static_cast<std::int64_t>(recorder.count_prefix("INSERT")), outcome.inserts);
  EXPECT_EQ(outcome.modifies, 0);
  EXPECT_EQ(outcome.inserts, plan.total_operations());
}

TEST_F(LoadedWarehouse, RefreshGrowsEveryTargetedTable) {
  init(desk_low(2, 2, 4, 2, 0.5));
  const auto before = backend_->warehouse_stats(schema_);
  EtlParams p;
  p.grr = 0.3;
  SeededRng plan_rng(5);
  const auto plan = plan_refresh(p, before, schema_, plan_rng);
  const auto outcome = execute_refresh(plan, schema_, *backend_, rng_, ref_);
  const auto after = backend_->warehouse_stats(schema_);
  std::int64_t planned_inserts = 0;
  for (const auto& l : plan.levels) {
    planned_inserts += l.inserts;
    EXPECT_EQ(after.count(l.table), before.count(l.table) + l.inserts) << l.table;
  }
  for (const auto& f : plan.facts) planned_inserts += f.inserts;
  EXPECT_EQ(outcome.inserts, planned_inserts);
  EXPECT_TRUE(integrity_violations(*backend_, schema_).empty());
}
