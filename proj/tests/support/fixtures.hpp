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
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dweb/dweb.hpp"

namespace dweb::testing {

/// Low-level parameters for a single fact table over `dims` identical dimensions.
inline LowLevelParams desk_low(std::size_t dims, std::size_t levels, std::size_t hh, double sf, double density,
                               std::size_t atts = 2, std::size_t measures = 2) {
  LowLevelParams low;
  low.nb_ft = 1;
  low.tot_nb_dim = dims;
  low.nb_dim = {dims};
  low.nb_meas = {measures};
  low.density = {density};
  for (std::size_t d = 0; d < dims; ++d) {
    low.nb_levels.push_back(levels);
    low.nb_att.emplace_back(levels, atts);
    low.hhlevel_size.push_back(hh);
    low.dim_sfactor.push_back(sf);
  }
  return low;
}

inline WarehouseSchema schema_for(const LowLevelParams& low, std::uint64_t seed = 1) {
  auto rng = SeededRng(seed).substream(stream::kSchema);
  return build_schema(low, rng);
}

inline StringReferential referential_for(std::uint64_t seed = 1, std::size_t pool = StringReferential::kDefaultPoolSize) {
  return StringReferential::build(SeededRng(seed).substream(stream::kReferential), pool);
}

inline std::unique_ptr<SqliteBackend> memory_backend() { return std::make_unique<SqliteBackend>(":memory:"); }

/// Creates and loads a warehouse into the backend.
inline WarehouseStats load_into(Backend& backend, const WarehouseSchema& schema, const StringReferential& ref,
                                std::uint64_t seed = 1) {
  auto rng = SeededRng(seed).substream(stream::kData);
  return run_load_test(schema, rng, ref, backend).stats;
}

/// Forwards to another backend and keeps every data-modifying statement.
class RecordingBackend final : public Backend {
 public:
  explicit RecordingBackend(Backend& inner) : inner_(inner) {}

  const DialectDescriptor& dialect() const override { return inner_.dialect(); }
  std::size_t execute_ddl(std::span<const std::string> statements) override { return inner_.execute_ddl(statements); }
  std::size_t bulk_insert(const TupleBatch& batch) override { return inner_.bulk_insert(batch); }
  QueryTiming execute_timed(std::string_view sql) override {
    ++timed_;
    return inner_.execute_timed(sql);
  }
  std::int64_t execute(std::string_view sql) override {
    statements_.emplace_back(sql);
    return inner_.execute(sql);
  }
  std::vector<Row> query(std::string_view sql) override { return inner_.query(sql); }
  std::vector<std::string> list_tables() override { return inner_.list_tables(); }

  std::size_t count_prefix(std::string_view prefix) const {
    std::size_t n = 0;
    for (const auto& s : statements_) n += s.rfind(prefix, 0) == 0 ? 1 : 0;
    return n;
  }
  std::size_t timed_queries() const { return timed_; }

 private:
  Backend& inner_;
  std::vector<std::string> statements_;
  std::size_t timed_ = 0;
};

/// Row count of one table.
inline std::int64_t count_rows(Backend& backend, const std::string& table) {
  return std::get<std::int64_t>(backend.query("SELECT COUNT(*) FROM " + table).at(0).at(0));
}

/// Fresh scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("dweb_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace dweb::testing
