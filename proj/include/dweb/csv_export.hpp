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

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>

#include "dweb/data_gen.hpp"
#include "dweb/error.hpp"
#include "dweb/value.hpp"

namespace dweb {

/// Batch sink writing one <table>.csv per table into a directory, with a
/// header row of column names.
class CsvDirectorySink {
 public:
  explicit CsvDirectorySink(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cannot create directory " + dir_.string() + ": " + ec.message());
  }

  void operator()(TupleBatch&& batch) {
    auto& out = stream_for(batch);
    for (const auto& row : batch.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
      out << '\n';
    }
    if (!out) throw Error("error writing " + (dir_ / (batch.table_name + ".csv")).string());
  }

  /// Flushes and closes every file written so far.
  void close() {
    for (auto& [table, out] : files_) {
      out->close();
      if (!*out) throw Error("error writing " + (dir_ / (table + ".csv")).string());
    }
    files_.clear();
  }

  BatchSink sink() {
    return [this](TupleBatch&& batch) { (*this)(std::move(batch)); };
  }

 private:
  std::ofstream& stream_for(const TupleBatch& batch) {
    auto it = files_.find(batch.table_name);
    if (it != files_.end()) return *it->second;
    const auto path = dir_ / (batch.table_name + ".csv");
    auto out = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*out) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < batch.columns.size(); ++i) *out << (i ? "," : "") << batch.columns[i];
    *out << '\n';
    return *files_.emplace(batch.table_name, std::move(out)).first->second;
  }

  std::filesystem::path dir_;
  std::map<std::string, std::unique_ptr<std::ofstream>> files_;
};

}  // namespace dweb
