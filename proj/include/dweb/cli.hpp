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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>

#include "dweb/connection.hpp"
#include "dweb/csv_export.hpp"
#include "dweb/data_gen.hpp"
#include "dweb/error.hpp"
#include "dweb/estimate.hpp"
#include "dweb/harness.hpp"
#include "dweb/params.hpp"
#include "dweb/pipeline.hpp"
#include "dweb/schema_gen.hpp"
#include "dweb/workload_io.hpp"

namespace dweb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kBackend = 2, kPrecondition = 3 };

/// Bad command-line usage (missing flag, missing file).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> low_level;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> db;
  std::optional<std::string> dialect;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  std::optional<std::string> workload;
  std::optional<std::size_t> repn;
  std::size_t batch_size = 1000;
  bool force_reset = false;
  bool new_workload = false;
  bool continue_on_error = false;
};

/// Runs a command body and maps errors to exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kPrecondition;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << '\n';
    return kBackend;
  } catch (const SaturationError& e) {
    err << "refresh error: " << e.what() << '\n';
    return kBackend;
  } catch (const StaleKeyError& e) {
    err << "refresh error: " << e.what() << '\n';
    return kBackend;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

inline ParameterSet load_parameters(const Options& o) {
  ParameterSet p;
  if (o.config) {
    if (!std::filesystem::exists(*o.config)) throw UsageError("config file not found: " + *o.config);
    p = read_config_file(*o.config);
  }
  if (o.seed) p.seed = *o.seed;
  if (o.repn) p.protocol.repn = *o.repn;
  if (o.continue_on_error) p.protocol.fail_policy = FailPolicy::kRecordAndContinue;
  return p;
}

inline Pipeline load_pipeline(const Options& o) {
  const auto params = load_parameters(o);
  std::optional<LowLevelParams> low;
  if (o.low_level) {
    if (!std::filesystem::exists(*o.low_level)) throw UsageError("low-level file not found: " + *o.low_level);
    low = read_low_level_file(*o.low_level);
  }
  return prepare_pipeline(params, low);
}

inline std::unique_ptr<Backend> open_backend(const Options& o) {
  if (!o.db) throw UsageError("--db is required");
  return connect(BackendConfig{*o.db, o.dialect, o.batch_size});
}

inline void print_stats(std::ostream& out, const WarehouseStats& stats) {
  for (const auto& t : stats.tables) out << "  " << std::left << std::setw(12) << t.table << std::right << t.rows << '\n';
  out << "  " << std::left << std::setw(12) << "total" << std::right << stats.global_size() << '\n';
}

inline int cmd_estimate(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto pipeline = load_pipeline(o);
    const auto est = estimate_size(pipeline.schema);
    out << std::fixed << std::setprecision(3);
    for (const auto& t : est.tables) {
      out << std::left << std::setw(12) << t.table << std::right << std::setw(22) << t.bytes / (1024.0 * 1024.0)
          << " MB\n";
    }
    out << std::left << std::setw(12) << "total" << std::right << std::setw(22) << est.megabytes() << " MB\n"
        << std::defaultfloat;
    if (est.too_large) out << "warning: estimate exceeds the representable size\n";
    return int{kOk};
  });
}

inline int cmd_load(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto pipeline = load_pipeline(o);
    auto backend = open_backend(o);
    if (backend->has_warehouse_tables()) {
      if (!o.force_reset) {
        throw PreconditionError("warehouse tables already exist; run reset or pass --force-reset");
      }
      out << "reset: dropped " << backend->reset_warehouse() << " tables\n";
    }
    if (o.out) write_ddl_file(*o.out, emit_ddl(pipeline.schema, backend->dialect()));
    auto rng = pipeline.data_rng();
    GenerationOptions gen;
    gen.batch_size = o.batch_size;
    const auto result = run_load_test(pipeline.schema, rng, pipeline.referential, *backend, gen);
    out << "load: " << result.ddl_statements << " tables created, " << result.stats.global_size() << " rows in "
        << std::fixed << std::setprecision(3) << to_ms(result.load_time) << " ms\n"
        << std::defaultfloat;
    print_stats(out, result.stats);
    if (o.csv) {
      CsvDirectorySink csv(*o.csv);
      auto again = pipeline.data_rng();
      generate_warehouse(pipeline.schema, again, pipeline.referential, csv.sink(), gen);
      csv.close();
      out << "data exported to " << *o.csv << '\n';
    }
    return int{kOk};
  });
}

inline int cmd_workload(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!o.out) throw UsageError("--out is required");
    const auto pipeline = load_pipeline(o);
    const auto w = pipeline.workload();
    save_workload_file(w, *o.out);
    out << "workload: " << w.queries.size() << " queries written to " << *o.out << '\n';
    return int{kOk};
  });
}

inline void print_recap(std::ostream& out, const ParameterSet& p, const Workload& w, const Backend& backend) {
  std::size_t olap = 0;
  for (const auto& q : w.queries) olap += q.kind == QueryKind::kOlap ? 1 : 0;
  out << "performance test\n"
      << "  dialect      " << backend.dialect().name << '\n'
      << "  queries      " << w.queries.size() << " (" << olap << " OLAP)\n"
      << "  repn         " << p.protocol.repn << '\n'
      << "  GRR/DRR/IR   " << format_real(p.etl.grr) << '/' << format_real(p.etl.drr) << '/' << format_real(p.etl.ir)
      << '\n'
      << "  on failure   " << (p.protocol.fail_policy == FailPolicy::kAbort ? "abort" : "record and continue") << '\n';
}

inline int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!o.new_workload && !o.workload) throw UsageError("--workload is required unless --new-workload is given");
    const auto pipeline = load_pipeline(o);
    auto backend = open_backend(o);
    const Workload w = o.new_workload ? pipeline.workload() : load_workload_file(*o.workload);
    print_recap(out, pipeline.params, w, *backend);
    auto rng = pipeline.refresh_rng();
    auto observer = [&](const PhaseEvent& e) {
      out << "  " << std::left << std::setw(7) << run_label(e.run) << std::setw(9) << e.phase << std::right
          << std::fixed << std::setprecision(3) << to_ms(e.duration) << " ms\n"
          << std::defaultfloat;
    };
    const auto timings = run_performance_test(w, pipeline.params.etl, pipeline.params.protocol, pipeline.schema,
                                              pipeline.referential, *backend, rng, observer);
    const auto summary = summarize(timings);
    if (o.csv) write_csv_file(timings, summary, *o.csv);
    write_summary(out, summary);
    if (timings.failures() > 0) out << timings.failures() << " query executions failed\n";
    return int{kOk};
  });
}

inline int cmd_reset(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto backend = open_backend(o);
    out << "reset: dropped " << backend->reset_warehouse() << " tables\n";
    return int{kOk};
  });
}

}  // namespace dweb::cli
