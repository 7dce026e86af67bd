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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dweb/backend.hpp"
#include "dweb/error.hpp"
#include "dweb/model.hpp"
#include "dweb/random.hpp"
#include "dweb/value.hpp"

namespace dweb {

struct GenerationOptions {
  std::size_t batch_size = 1000;
  /// Upper bound on a fact table's Cartesian product of finest-level keys.
  double max_fact_candidates = 1e8;
};

/// Raised when a sink rejects a batch; records where generation stopped.
class LoadError : public BackendError {
 public:
  LoadError(const std::string& what, std::string table, std::size_t batch, std::string last_completed)
      : BackendError(what), table_(std::move(table)), batch_(batch), last_completed_(std::move(last_completed)) {}

  const std::string& table() const noexcept { return table_; }
  std::size_t batch() const noexcept { return batch_; }
  /// Last table fully written before the failure; empty when none.
  const std::string& last_completed_table() const noexcept { return last_completed_; }

 private:
  std::string table_;
  std::size_t batch_;
  std::string last_completed_;
};

using BatchSink = std::function<void(TupleBatch&&)>;

inline constexpr double kMeasureLow = 0.0;
inline constexpr double kMeasureHigh = 100.0;

/// Single-precision measure, uniform in [0, 100).
inline double random_measure(SeededRng& rng) {
  float f = static_cast<float>(uniform_float(rng, kMeasureLow, kMeasureHigh));
  if (f >= static_cast<float>(kMeasureHigh)) f = std::nextafter(static_cast<float>(kMeasureHigh), 0.0f);
  return static_cast<double>(f);
}

namespace detail {

/// Buffers rows and hands full batches to the sink.
class Batcher {
 public:
  Batcher(std::string table, std::vector<std::string> columns, std::size_t batch_size, const BatchSink& sink)
      : table_(std::move(table)), columns_(std::move(columns)), batch_size_(std::max<std::size_t>(1, batch_size)),
        sink_(sink) {}

  void push(Row row) {
    rows_.push_back(std::move(row));
    if (rows_.size() >= batch_size_) flush();
  }

  void flush() {
    if (rows_.empty()) return;
    TupleBatch batch{table_, columns_, std::move(rows_), ordinal_};
    rows_ = {};
    try {
      sink_(std::move(batch));
    } catch (const LoadError&) {
      throw;
    } catch (const std::exception& e) {
      throw LoadError(table_ + " batch " + std::to_string(ordinal_) + ": " + e.what(), table_, ordinal_, "");
    }
    ++ordinal_;
  }

  std::int64_t emitted() const noexcept { return emitted_; }
  void count() { ++emitted_; }

 private:
  std::string table_;
  std::vector<std::string> columns_;
  std::size_t batch_size_;
  const BatchSink& sink_;
  std::vector<Row> rows_;
  std::size_t ordinal_ = 0;
  std::int64_t emitted_ = 0;
};

}  // namespace detail

/// Generates one dimension coarsest level first. Keys are sequential from 1;
/// each finer row references a random key of the level generated just before.
/// Returns row counts ordered coarsest to finest.
inline std::vector<std::int64_t> generate_dimension(const DimensionDef& dim, SeededRng& rng,
                                                    const StringReferential& ref, const BatchSink& sink,
                                                    const GenerationOptions& options = {}) {
  std::vector<std::int64_t> counts;
  std::int64_t coarser_size = 0;
  for (std::size_t h = dim.levels.size(); h-- > 0;) {
    const auto& lvl = dim.levels[h];
    detail::Batcher out(lvl.table_name, lvl.columns(), options.batch_size, sink);
    for (std::int64_t key = 1; key <= lvl.target_cardinality; ++key) {
      Row row;
      row.reserve(lvl.members.size() + 2);
      row.emplace_back(key);
      for (const auto& m : lvl.members) row.emplace_back(random_string(rng, ref, m));
      if (lvl.foreign_key) row.emplace_back(random_key(rng, coarser_size));
      out.push(std::move(row));
      out.count();
    }
    out.flush();
    counts.push_back(out.emitted());
    coarser_size = lvl.target_cardinality;
  }
  return counts;
}

/// Number of candidate key combinations of a fact table.
inline double fact_candidates(const FactTableDef& fact, const WarehouseSchema& schema) {
  double n = 1.0;
  for (auto d : fact.dim_refs) n *= static_cast<double>(schema.dimensions.at(d).finest().target_cardinality);
  return n;
}

/// Walks the Cartesian product of the referenced finest-level keys (first
/// dimension slowest) and keeps each combination with probability density.
inline std::int64_t generate_fact(const FactTableDef& fact, const WarehouseSchema& schema, SeededRng& rng,
                                  const BatchSink& sink, const GenerationOptions& options = {}) {
  const double candidates = fact_candidates(fact, schema);
  if (candidates > options.max_fact_candidates) {
    throw GenerationError("fact table too large: " + fact.table_name + " has " + format_real(candidates) +
                          " candidate key combinations (cap " + format_real(options.max_fact_candidates) + ")");
  }
  std::vector<std::int64_t> sizes;
  for (auto d : fact.dim_refs) sizes.push_back(schema.dimensions.at(d).finest().target_cardinality);

  detail::Batcher out(fact.table_name, fact.columns(), options.batch_size, sink);
  const bool empty = sizes.empty() || std::any_of(sizes.begin(), sizes.end(), [](auto s) { return s < 1; });
  std::vector<std::int64_t> key(sizes.size(), 1);
  auto advance = [&] {
    for (std::size_t pos = key.size(); pos-- > 0;) {
      if (++key[pos] <= sizes[pos]) return true;
      key[pos] = 1;
    }
    return false;
  };
  if (!empty) {
    do {
      if (bernoulli(rng, fact.density)) {
        Row row;
        row.reserve(key.size() + fact.measures.size());
        for (auto k : key) row.emplace_back(k);
        for (std::size_t m = 0; m < fact.measures.size(); ++m) row.emplace_back(random_measure(rng));
        out.push(std::move(row));
        out.count();
      }
    } while (advance());
  }
  out.flush();
  return out.emitted();
}

struct LoadResult {
  WarehouseStats stats;
  Duration duration{0};
};

/// Generates every table (dimensions, then facts) into a sink.
inline WarehouseStats generate_warehouse(const WarehouseSchema& schema, SeededRng& rng, const StringReferential& ref,
                                         const BatchSink& sink, const GenerationOptions& options = {}) {
  for (const auto& fact : schema.fact_tables) {
    if (fact_candidates(fact, schema) > options.max_fact_candidates) {
      throw GenerationError("fact table too large: " + fact.table_name + " exceeds " +
                            format_real(options.max_fact_candidates) + " candidate key combinations");
    }
  }
  WarehouseStats stats;
  std::string current;
  std::string last_completed;
  BatchSink tracking = [&](TupleBatch&& batch) {
    if (batch.table_name != current) {
      if (!current.empty()) last_completed = current;
      current = batch.table_name;
    }
    sink(std::move(batch));
  };
  try {
    for (const auto& dim : schema.dimensions) {
      const auto counts = generate_dimension(dim, rng, ref, tracking, options);
      for (std::size_t i = 0; i < counts.size(); ++i) {
        stats.tables.push_back({dim.levels[dim.levels.size() - 1 - i].table_name, counts[i]});
      }
    }
    for (const auto& fact : schema.fact_tables) {
      stats.tables.push_back({fact.table_name, generate_fact(fact, schema, rng, tracking, options)});
    }
  } catch (const LoadError& e) {
    throw LoadError(e.what(), e.table(), e.batch(), last_completed);
  }
  return stats;
}

/// Generates and bulk-inserts the whole warehouse. The DDL must already be
/// applied. On failure the partially loaded warehouse is left in place.
inline LoadResult load_warehouse(const WarehouseSchema& schema, SeededRng& rng, const StringReferential& ref,
                                 Backend& backend, const GenerationOptions& options = {}) {
  const auto start = Clock::now();
  BatchSink sink = [&](TupleBatch&& batch) { backend.bulk_insert(batch); };
  LoadResult result;
  result.stats = generate_warehouse(schema, rng, ref, sink, options);
  result.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
  return result;
}

}  // namespace dweb
