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

#include <sqlite3.h>

#include <chrono>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dweb/backend.hpp"
#include "dweb/dialect.hpp"
#include "dweb/error.hpp"
#include "dweb/value.hpp"

namespace dweb {

struct SqliteOptions {
  bool enforce_foreign_keys = true;
};

/// Embedded reference engine.
class SqliteBackend final : public Backend {
 public:
  using Options = SqliteOptions;

  /// Opens (creating if needed) a database file; ":memory:" for a private
  /// in-memory database.
  explicit SqliteBackend(const std::string& path, DialectDescriptor dialect = dialects::sqlite(),
                         Options options = Options{})
      : dialect_(std::move(dialect)) {
    sqlite3* raw = nullptr;
    const int rc = sqlite3_open_v2(path.c_str(), &raw, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr);
    db_.reset(raw);
    if (rc != SQLITE_OK) {
      const std::string msg = raw ? sqlite3_errmsg(raw) : "out of memory";
      throw ConnectionError("cannot open sqlite database '" + path + "': " + msg);
    }
    sqlite3_busy_timeout(db_.get(), 5000);
    exec_simple(options.enforce_foreign_keys ? "PRAGMA foreign_keys = ON" : "PRAGMA foreign_keys = OFF");
  }

  const DialectDescriptor& dialect() const override { return dialect_; }

  std::size_t execute_ddl(std::span<const std::string> statements) override {
    std::size_t applied = 0;
    for (const auto& s : statements) {
      char* err = nullptr;
      if (sqlite3_exec(db_.get(), s.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw StatementError("DDL statement " + std::to_string(applied) + " failed: " + msg + " [" + excerpt(s) + "]",
                             applied);
      }
      ++applied;
    }
    return applied;
  }

  std::size_t bulk_insert(const TupleBatch& batch) override {
    const std::size_t arity = batch.columns.size();
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
      if (batch.rows[i].size() != arity) {
        throw StatementError(batch.table_name + ": row " + std::to_string(i) + " has " +
                                 std::to_string(batch.rows[i].size()) + " values, expected " + std::to_string(arity),
                             i);
      }
    }
    if (batch.rows.empty()) return 0;

    std::string sql = "INSERT INTO " + dialect_.identifier(batch.table_name) + " (";
    for (std::size_t c = 0; c < arity; ++c) sql += (c ? ", " : "") + dialect_.identifier(batch.columns[c]);
    sql += ") VALUES (";
    for (std::size_t c = 0; c < arity; ++c) sql += c ? ", ?" : "?";
    sql += ")";

    exec_simple("BEGIN");
    try {
      Statement stmt = prepare(sql);
      for (std::size_t i = 0; i < batch.rows.size(); ++i) {
        const auto& row = batch.rows[i];
        for (std::size_t c = 0; c < arity; ++c) bind(stmt.get(), static_cast<int>(c + 1), row[c]);
        if (sqlite3_step(stmt.get()) != SQLITE_DONE) {
          throw StatementError(batch.table_name + ": insert of row " + std::to_string(i) + " failed: " +
                                   sqlite3_errmsg(db_.get()),
                               i);
        }
        sqlite3_reset(stmt.get());
        sqlite3_clear_bindings(stmt.get());
      }
      stmt.reset();
      exec_simple("COMMIT");
    } catch (...) {
      sqlite3_exec(db_.get(), "ROLLBACK", nullptr, nullptr, nullptr);
      throw;
    }
    return batch.rows.size();
  }

  QueryTiming execute_timed(std::string_view sql) override {
    QueryTiming t;
    const auto start = Clock::now();
    Statement stmt = prepare(sql);
    const int cols = sqlite3_column_count(stmt.get());
    while (true) {
      const int rc = sqlite3_step(stmt.get());
      if (rc == SQLITE_ROW) {
        // Touch every column so the full answer is materialized.
        for (int c = 0; c < cols; ++c) {
          if (sqlite3_column_type(stmt.get(), c) == SQLITE_TEXT) {
            (void)sqlite3_column_bytes(stmt.get(), c);
          } else {
            (void)sqlite3_column_double(stmt.get(), c);
          }
        }
        ++t.rows;
      } else if (rc == SQLITE_DONE) {
        break;
      } else {
        throw StatementError("query failed: " + std::string(sqlite3_errmsg(db_.get())) + " [" + excerpt(sql) + "]", 0);
      }
    }
    t.duration = std::chrono::duration_cast<Duration>(Clock::now() - start);
    return t;
  }

  std::int64_t execute(std::string_view sql) override {
    Statement stmt = prepare(sql);
    int rc;
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
    }
    if (rc != SQLITE_DONE) {
      throw StatementError("statement failed: " + std::string(sqlite3_errmsg(db_.get())) + " [" + excerpt(sql) + "]", 0);
    }
    return sqlite3_changes(db_.get());
  }

  std::vector<Row> query(std::string_view sql) override {
    Statement stmt = prepare(sql);
    const int cols = sqlite3_column_count(stmt.get());
    std::vector<Row> rows;
    int rc;
    while ((rc = sqlite3_step(stmt.get())) == SQLITE_ROW) {
      Row row;
      row.reserve(static_cast<std::size_t>(cols));
      for (int c = 0; c < cols; ++c) row.push_back(column_value(stmt.get(), c));
      rows.push_back(std::move(row));
    }
    if (rc != SQLITE_DONE) {
      throw StatementError("query failed: " + std::string(sqlite3_errmsg(db_.get())) + " [" + excerpt(sql) + "]", 0);
    }
    return rows;
  }

  std::vector<std::string> list_tables() override {
    std::vector<std::string> names;
    for (auto& row : query("SELECT name FROM sqlite_master WHERE type = 'table' ORDER BY name")) {
      names.push_back(std::get<std::string>(row.front()));
    }
    return names;
  }

 private:
  struct DbCloser {
    void operator()(sqlite3* db) const noexcept { sqlite3_close_v2(db); }
  };
  struct StmtFinalizer {
    void operator()(sqlite3_stmt* s) const noexcept { sqlite3_finalize(s); }
  };
  using Statement = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

  static std::string excerpt(std::string_view sql) {
    constexpr std::size_t kMax = 160;
    if (sql.size() <= kMax) return std::string(sql);
    return std::string(sql.substr(0, kMax)) + "...";
  }

  void exec_simple(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_.get(), sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw BackendError(std::string(sql) + ": " + msg);
    }
  }

  Statement prepare(std::string_view sql) {
    sqlite3_stmt* raw = nullptr;
    const char* tail = nullptr;
    const int rc = sqlite3_prepare_v2(db_.get(), sql.data(), static_cast<int>(sql.size()), &raw, &tail);
    Statement stmt(raw);
    if (rc != SQLITE_OK) {
      throw StatementError("cannot prepare: " + std::string(sqlite3_errmsg(db_.get())) + " [" + excerpt(sql) + "]", 0);
    }
    if (!stmt) throw StatementError("empty statement", 0);
    return stmt;
  }

  void bind(sqlite3_stmt* stmt, int index, const Value& v) {
    int rc = SQLITE_OK;
    if (is_null(v)) {
      rc = sqlite3_bind_null(stmt, index);
    } else if (const auto* i = std::get_if<std::int64_t>(&v)) {
      rc = sqlite3_bind_int64(stmt, index, *i);
    } else if (const auto* d = std::get_if<double>(&v)) {
      rc = sqlite3_bind_double(stmt, index, *d);
    } else {
      const auto& s = std::get<std::string>(v);
      rc = sqlite3_bind_text(stmt, index, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
    }
    if (rc != SQLITE_OK) throw BackendError("bind failed: " + std::string(sqlite3_errmsg(db_.get())));
  }

  static Value column_value(sqlite3_stmt* stmt, int c) {
    switch (sqlite3_column_type(stmt, c)) {
      case SQLITE_INTEGER:
        return static_cast<std::int64_t>(sqlite3_column_int64(stmt, c));
      case SQLITE_FLOAT:
        return sqlite3_column_double(stmt, c);
      case SQLITE_TEXT: {
        const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(stmt, c));
        return std::string(text, static_cast<std::size_t>(sqlite3_column_bytes(stmt, c)));
      }
      case SQLITE_BLOB: {
        const auto* blob = static_cast<const char*>(sqlite3_column_blob(stmt, c));
        return std::string(blob ? blob : "", static_cast<std::size_t>(sqlite3_column_bytes(stmt, c)));
      }
      default:
        return std::monostate{};
    }
  }

  DialectDescriptor dialect_;
  std::unique_ptr<sqlite3, DbCloser> db_;
};

}  // namespace dweb
