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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dweb/backend.hpp"
#include "dweb/data_gen.hpp"
#include "dweb/error.hpp"
#include "dweb/etl.hpp"
#include "dweb/model.hpp"
#include "dweb/params.hpp"
#include "dweb/random.hpp"
#include "dweb/schema_gen.hpp"
#include "dweb/sql_render.hpp"
#include "dweb/workload_gen.hpp"

namespace dweb {

// ---------------------------------------------------------------------------
// Load test
// ---------------------------------------------------------------------------

struct LoadTestResult {
  Duration load_time{0};
  WarehouseStats stats;
  std::size_t ddl_statements = 0;
};

/// Creates the warehouse tables and fills them. The duration covers both.
/// Existing tables with the same names make the DDL fail.
inline LoadTestResult run_load_test(const WarehouseSchema& schema, SeededRng& rng, const StringReferential& referential,
                                    Backend& backend, const GenerationOptions& options = {}) {
  const auto ddl = emit_ddl(schema, backend.dialect());
  const auto start = Clock::now();
  LoadTestResult result;
  result.ddl_statements = backend.execute_ddl(ddl);
  result.stats = load_warehouse(schema, rng, referential, backend, options).stats;
  result.load_time = std::chrono::duration_cast<Duration>(Clock::now() - start);
  return result;
}

// ---------------------------------------------------------------------------
// Performance test
// ---------------------------------------------------------------------------

struct QueryRecord {
  Duration duration{0};
  std::int64_t rows = 0;
  bool failed = false;
  std::string error;

  bool operator==(const QueryRecord&) const = default;
};

/// etime[0] is the cold run, etime[i] and rtime[i-1] belong to warm run i.
/// queries[r][q] is query q of run r (same indexing as etime).
struct RunTimings {
  std::vector<Duration> etime;
  std::vector<Duration> rtime;
  std::vector<std::vector<QueryRecord>> queries;

  std::size_t repn() const { return rtime.size(); }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& run : queries) n += std::count_if(run.begin(), run.end(), [](auto& q) { return q.failed; });
    return n;
  }

  bool operator==(const RunTimings&) const = default;
};

/// Label used in reports: "cold" for run 0, "warmN" afterwards.
inline std::string run_label(std::size_t run) { return run == 0 ? "cold" : "warm" + std::to_string(run); }

/// Query failure under the abort policy.
class QueryFailure : public BackendError {
 public:
  QueryFailure(const std::string& what, std::size_t run, std::size_t query)
      : BackendError(what), run_(run), query_(query) {}
  std::size_t run() const noexcept { return run_; }
  std::size_t query() const noexcept { return query_; }

 private:
  std::size_t run_;
  std::size_t query_;
};

struct PhaseEvent {
  std::size_t run = 0;
  std::string phase;  // "workload" or "refresh"
  Duration duration{0};
};
using PhaseObserver = std::function<void(const PhaseEvent&)>;

namespace detail {

inline Duration since(Clock::time_point start) {
  return std::chrono::duration_cast<Duration>(Clock::now() - start);
}

inline bool has_schema_tables(Backend& backend, const WarehouseSchema& schema) {
  const auto present = backend.list_tables();
  for (const auto& t : schema.tables_in_dependency_order()) {
    if (std::find(present.begin(), present.end(), t) == present.end()) return false;
  }
  return true;
}

}  // namespace detail

/// Cold run, then repn times {refresh, workload}. Statistics feeding the
/// refresh quotas are recomputed before each refresh, outside its timing.
inline RunTimings run_performance_test(const Workload& workload, const EtlParams& etl, const ProtocolParams& protocol,
                                       const WarehouseSchema& schema, const StringReferential& referential,
                                       Backend& backend, SeededRng& rng, const PhaseObserver& observer = {}) {
  if (!detail::has_schema_tables(backend, schema)) {
    throw PreconditionError("warehouse is not loaded: run the load test first");
  }
  std::vector<std::string> sql;
  sql.reserve(workload.queries.size());
  for (const auto& q : workload.queries) sql.push_back(render_sql(q, backend.dialect()));

  RunTimings t;
  auto run_workload = [&](std::size_t run) {
    std::vector<QueryRecord> records;
    records.reserve(sql.size());
    const auto start = Clock::now();
    for (std::size_t i = 0; i < sql.size(); ++i) {
      QueryRecord rec;
      const auto q_start = Clock::now();
      try {
        const auto timing = backend.execute_timed(sql[i]);
        rec.duration = timing.duration;
        rec.rows = timing.rows;
      } catch (const BackendError& e) {
        rec.duration = detail::since(q_start);
        if (protocol.fail_policy == FailPolicy::kAbort) {
          throw QueryFailure(run_label(run) + " query " + std::to_string(i + 1) + ": " + e.what(), run, i + 1);
        }
        rec.failed = true;
        rec.error = e.what();
      }
      records.push_back(std::move(rec));
    }
    t.etime.push_back(detail::since(start));
    t.queries.push_back(std::move(records));
    if (observer) observer({run, "workload", t.etime.back()});
  };

  run_workload(0);
  for (std::size_t run = 1; run <= protocol.repn; ++run) {
    const auto stats = backend.warehouse_stats(schema);
    const auto plan = plan_refresh(etl, stats, schema, rng);
    const auto start = Clock::now();
    execute_refresh(plan, schema, backend, rng, referential);
    t.rtime.push_back(detail::since(start));
    if (observer) observer({run, "refresh", t.rtime.back()});
    run_workload(run);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

/// Statistics of one series, in milliseconds. Standard deviation is the
/// population one.
struct SeriesSummary {
  std::size_t count = 0;
  double global = 0;
  double average = 0;
  double minimum = 0;
  double maximum = 0;
  double stdev = 0;
};

/// Empty when the series is.
inline std::optional<SeriesSummary> summarize_series(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  SeriesSummary s;
  s.count = values.size();
  s.minimum = *std::min_element(values.begin(), values.end());
  s.maximum = *std::max_element(values.begin(), values.end());
  for (double v : values) s.global += v;
  s.average = std::clamp(s.global / static_cast<double>(s.count), s.minimum, s.maximum);
  double sq = 0;
  for (double v : values) sq += (v - s.average) * (v - s.average);
  s.stdev = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

/// cold: etime[0]; workload: warm etime[1..repn]; refresh: rtime;
/// combined: rtime[i] + etime[i] per warm run.
struct MetricsSummary {
  std::optional<SeriesSummary> cold;
  std::optional<SeriesSummary> workload;
  std::optional<SeriesSummary> refresh;
  std::optional<SeriesSummary> combined;
};

inline double to_ms(Duration d) { return std::chrono::duration<double, std::milli>(d).count(); }

inline MetricsSummary summarize(const RunTimings& t) {
  MetricsSummary m;
  std::vector<double> cold, warm, refresh, combined;
  for (std::size_t i = 0; i < t.etime.size(); ++i) (i == 0 ? cold : warm).push_back(to_ms(t.etime[i]));
  for (std::size_t i = 0; i < t.rtime.size(); ++i) {
    refresh.push_back(to_ms(t.rtime[i]));
    if (i + 1 < t.etime.size()) combined.push_back(to_ms(t.rtime[i] + t.etime[i + 1]));
  }
  m.cold = summarize_series(cold);
  m.workload = summarize_series(warm);
  m.refresh = summarize_series(refresh);
  m.combined = summarize_series(combined);
  return m;
}

/// Aligned text table of a summary.
inline void write_summary(std::ostream& out, const MetricsSummary& m) {
  const std::pair<const char*, const std::optional<SeriesSummary>*> rows[] = {
      {"cold", &m.cold}, {"workload", &m.workload}, {"refresh", &m.refresh}, {"combined", &m.combined}};
  out << std::left << std::setw(10) << "series" << std::right << std::setw(7) << "count" << std::setw(14)
      << "global_ms" << std::setw(12) << "avg_ms" << std::setw(12) << "min_ms" << std::setw(12) << "max_ms"
      << std::setw(12) << "stdev_ms" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& [name, s] : rows) {
    out << std::left << std::setw(10) << name << std::right;
    if (!*s) {
      out << std::setw(7) << 0 << std::setw(14) << "-" << std::setw(12) << "-" << std::setw(12) << "-"
          << std::setw(12) << "-" << std::setw(12) << "-" << '\n';
      continue;
    }
    const auto& v = **s;
    out << std::setw(7) << v.count << std::setw(14) << v.global << std::setw(12) << v.average << std::setw(12)
        << v.minimum << std::setw(12) << v.maximum << std::setw(12) << v.stdev << '\n';
  }
  out << std::defaultfloat << "(stdev is the population standard deviation)\n";
}

// ---------------------------------------------------------------------------
// CSV
//
//   run,phase,kind,duration_ms
//   cold,workload,-,12
//   cold,query,1,3
//   warm1,refresh,-,0
//   ...
//   # failed,<run>,<query>,<message>
//   # summary,<series>,count=..,global_ms=..,avg_ms=..,min_ms=..,max_ms=..,stdev_ms=..
//
// Durations are whole milliseconds, truncated.
// ---------------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "run,phase,kind,duration_ms";

inline std::int64_t whole_ms(Duration d) { return std::chrono::duration_cast<std::chrono::milliseconds>(d).count(); }

inline void write_csv(std::ostream& out, const RunTimings& t, const MetricsSummary& m) {
  out << kCsvHeader << '\n';
  for (std::size_t run = 0; run < t.etime.size(); ++run) {
    const auto label = run_label(run);
    if (run > 0 && run - 1 < t.rtime.size()) out << label << ",refresh,-," << whole_ms(t.rtime[run - 1]) << '\n';
    out << label << ",workload,-," << whole_ms(t.etime[run]) << '\n';
    if (run < t.queries.size()) {
      for (std::size_t q = 0; q < t.queries[run].size(); ++q) {
        out << label << ",query," << (q + 1) << ',' << whole_ms(t.queries[run][q].duration) << '\n';
      }
    }
  }
  for (std::size_t run = 0; run < t.queries.size(); ++run) {
    for (std::size_t q = 0; q < t.queries[run].size(); ++q) {
      const auto& rec = t.queries[run][q];
      if (!rec.failed) continue;
      std::string msg = rec.error;
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << "# failed," << run_label(run) << ',' << (q + 1) << ',' << msg << '\n';
    }
  }
  const std::pair<const char*, const std::optional<SeriesSummary>*> rows[] = {
      {"cold", &m.cold}, {"workload", &m.workload}, {"refresh", &m.refresh}, {"combined", &m.combined}};
  for (const auto& [name, s] : rows) {
    out << "# summary," << name;
    if (!*s) {
      out << ",empty\n";
      continue;
    }
    const auto& v = **s;
    out << ",count=" << v.count << ",global_ms=" << format_real(v.global) << ",avg_ms=" << format_real(v.average)
        << ",min_ms=" << format_real(v.minimum) << ",max_ms=" << format_real(v.maximum)
        << ",stdev_ms=" << format_real(v.stdev) << '\n';
  }
  out << "# summary,stdev=population\n";
}

inline void write_csv_file(const RunTimings& t, const MetricsSummary& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write CSV file " + path);
  write_csv(out, t, m);
  out.flush();
  if (!out) throw Error("error writing CSV file " + path);
}

/// Rebuilds timings from a CSV file at millisecond resolution.
inline RunTimings read_csv(std::istream& in) {
  RunTimings t;
  std::string raw;
  std::size_t line = 0;
  if (!std::getline(in, raw) || detail::trim(raw) != kCsvHeader) throw ParseError("missing CSV header", 1);
  ++line;

  auto parse_run = [&](std::string_view label) -> std::size_t {
    if (label == "cold") return 0;
    if (label.starts_with("warm")) {
      const auto n = detail::parse_u64(label.substr(4), "run", line);
      if (n >= 1) return static_cast<std::size_t>(n);
    }
    throw ParseError("bad run label '" + std::string(label) + "'", line);
  };
  auto ms = [&](std::string_view text) {
    return Duration(std::chrono::milliseconds(static_cast<std::int64_t>(detail::parse_u64(text, "duration_ms", line))));
  };

  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto text = detail::trim(raw);
    if (text.empty()) continue;
    if (text.starts_with("# failed,")) {
      const auto rest = text.substr(9);
      const auto c1 = rest.find(',');
      const auto c2 = c1 == std::string_view::npos ? c1 : rest.find(',', c1 + 1);
      if (c2 == std::string_view::npos) throw ParseError("malformed failure row", line);
      const auto run = parse_run(rest.substr(0, c1));
      const auto q = detail::parse_u64(rest.substr(c1 + 1, c2 - c1 - 1), "query", line);
      if (run >= t.queries.size() || q < 1 || q > t.queries[run].size()) {
        throw ParseError("failure row for unknown query", line);
      }
      auto& rec = t.queries[run][q - 1];
      rec.failed = true;
      rec.error = std::string(rest.substr(c2 + 1));
      continue;
    }
    if (text.starts_with("#")) continue;

    const auto f = detail::split(text, ',');
    if (f.size() != 4) throw ParseError("expected 4 fields", line);
    const auto run = parse_run(f[0]);
    if (f[1] == "workload") {
      if (run != t.etime.size()) throw ParseError("workload row out of order", line);
      t.etime.push_back(ms(f[3]));
      t.queries.emplace_back();
    } else if (f[1] == "refresh") {
      if (run != t.rtime.size() + 1 || run != t.etime.size()) throw ParseError("refresh row out of order", line);
      t.rtime.push_back(ms(f[3]));
    } else if (f[1] == "query") {
      if (run + 1 != t.etime.size()) throw ParseError("query row before its workload row", line);
      const auto q = detail::parse_u64(f[2], "kind", line);
      if (q != t.queries[run].size() + 1) throw ParseError("query ordinal out of sequence", line);
      QueryRecord rec;
      rec.duration = ms(f[3]);
      t.queries[run].push_back(rec);
    } else {
      throw ParseError("unknown phase '" + std::string(f[1]) + "'", line);
    }
  }
  return t;
}

inline RunTimings read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open CSV file " + path);
  return read_csv(in);
}

/// Timings with every duration truncated to whole milliseconds, as stored in CSV.
inline RunTimings truncate_to_ms(RunTimings t) {
  auto cut = [](Duration& d) { d = std::chrono::duration_cast<std::chrono::milliseconds>(d); };
  for (auto& d : t.etime) cut(d);
  for (auto& d : t.rtime) cut(d);
  for (auto& run : t.queries) {
    for (auto& q : run) {
      cut(q.duration);
      q.rows = 0;
      std::replace(q.error.begin(), q.error.end(), '\n', ' ');
    }
  }
  return t;
}

}  // namespace dweb
