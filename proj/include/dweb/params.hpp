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
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dweb/error.hpp"
#include "dweb/random.hpp"

namespace dweb {

/// Average-valued warehouse knobs. Defaults describe a snowflake schema.
struct HighLevelParams {
  double avg_nb_ft = 1;
  double avg_nb_dim = 5;
  double avg_tot_nb_dim = 5;
  double avg_nb_meas = 5;
  double avg_density = 0.6;
  double avg_nb_levels = 3;
  double avg_nb_att = 5;
  double avg_hhlevel_size = 10;
  double dim_sfactor = 10;
  /// Gaussian spread as a fraction of each mean.
  double sigma_ratio = 0.2;

  bool operator==(const HighLevelParams&) const = default;
};

/// Fully specified warehouse shape. Indices are 0-based.
struct LowLevelParams {
  std::size_t nb_ft = 0;
  std::size_t tot_nb_dim = 0;
  std::vector<std::size_t> nb_dim;   // per fact table
  std::vector<std::size_t> nb_meas;  // per fact table
  std::vector<double> density;       // per fact table
  std::vector<std::size_t> nb_levels;             // per dimension
  std::vector<std::vector<std::size_t>> nb_att;   // [dimension][level], level 0 = finest
  std::vector<std::size_t> hhlevel_size;          // per dimension
  std::vector<double> dim_sfactor;                // per dimension

  bool operator==(const LowLevelParams&) const = default;
};

struct WorkloadParams {
  std::size_t nb_q = 100;
  double q_avg_nb_att = 5;
  double avg_nb_restr = 3;
  double prob_olap = 0.9;
  double avg_nb_aggreg = 3;
  double prob_cube = 0.3;
  double prob_having = 0.2;
  double avg_nb_dd = 3;

  double prob_extract() const noexcept { return 1.0 - prob_olap; }
  double prob_rollup() const noexcept { return 1.0 - prob_cube; }

  bool operator==(const WorkloadParams&) const = default;
};

struct EtlParams {
  double grr = 0.01;
  double drr = 0.05;
  double ir = 0.95;

  double frr() const noexcept { return 1.0 - drr; }
  double mr() const noexcept { return 1.0 - ir; }

  bool operator==(const EtlParams&) const = default;
};

enum class FailPolicy { kAbort, kRecordAndContinue };

struct ProtocolParams {
  std::size_t repn = 4;
  FailPolicy fail_policy = FailPolicy::kAbort;

  bool operator==(const ProtocolParams&) const = default;
};

/// Everything a run needs.
struct ParameterSet {
  HighLevelParams warehouse;
  WorkloadParams workload;
  EtlParams etl;
  ProtocolParams protocol;
  std::uint64_t seed = 1;

  bool operator==(const ParameterSet&) const = default;
};

// ---------------------------------------------------------------------------
// Derivation and validation
// ---------------------------------------------------------------------------

inline constexpr double kMinDensity = 0.01;

/// Draws low-level values around the high-level averages. Every draw is
/// clamped into its legal range, so the result always validates.
inline LowLevelParams derive_low_level(const HighLevelParams& high, SeededRng& rng) {
  const double sigma = high.sigma_ratio;
  auto count = [&](double avg) { return static_cast<std::size_t>(gauss_int(rng, avg, sigma)); };
  auto real = [&](double avg, double lo, double hi) {
    const double v = sigma > 0.0 ? gaussian(rng, avg, sigma * avg) : avg;
    return std::clamp(v, lo, hi);
  };

  LowLevelParams low;
  low.tot_nb_dim = count(high.avg_tot_nb_dim);
  low.nb_ft = count(high.avg_nb_ft);
  for (std::size_t f = 0; f < low.nb_ft; ++f) {
    low.nb_dim.push_back(std::min(count(high.avg_nb_dim), low.tot_nb_dim));
    low.nb_meas.push_back(count(high.avg_nb_meas));
    low.density.push_back(real(high.avg_density, kMinDensity, 1.0));
  }
  // Dimensions no fact table can reach are dropped.
  const std::size_t referenced = std::accumulate(low.nb_dim.begin(), low.nb_dim.end(), std::size_t{0});
  low.tot_nb_dim = std::min(low.tot_nb_dim, referenced);

  for (std::size_t d = 0; d < low.tot_nb_dim; ++d) {
    const std::size_t levels = count(high.avg_nb_levels);
    low.nb_levels.push_back(levels);
    std::vector<std::size_t> atts;
    for (std::size_t h = 0; h < levels; ++h) atts.push_back(count(high.avg_nb_att));
    low.nb_att.push_back(std::move(atts));
    low.hhlevel_size.push_back(count(high.avg_hhlevel_size));
    low.dim_sfactor.push_back(real(high.dim_sfactor, 1.0, std::numeric_limits<double>::max()));
  }
  return low;
}

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool mentions(std::string_view needle) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
  }
};

inline ValidationReport validate_params(const LowLevelParams& low) {
  ValidationReport r;
  auto fail = [&](std::string msg) { r.violations.push_back(std::move(msg)); };

  if (low.nb_ft < 1) fail("nb_ft >= 1");
  if (low.tot_nb_dim < 1) fail("tot_nb_dim >= 1");
  if (low.nb_dim.size() != low.nb_ft) fail("nb_dim has one entry per fact table");
  if (low.nb_meas.size() != low.nb_ft) fail("nb_meas has one entry per fact table");
  if (low.density.size() != low.nb_ft) fail("density has one entry per fact table");
  if (low.nb_levels.size() != low.tot_nb_dim) fail("nb_levels has one entry per dimension");
  if (low.nb_att.size() != low.tot_nb_dim) fail("nb_att has one row per dimension");
  if (low.hhlevel_size.size() != low.tot_nb_dim) fail("hhlevel_size has one entry per dimension");
  if (low.dim_sfactor.size() != low.tot_nb_dim) fail("dim_sfactor has one entry per dimension");

  const std::size_t sum_dims = std::accumulate(low.nb_dim.begin(), low.nb_dim.end(), std::size_t{0});
  if (low.tot_nb_dim > sum_dims) fail("tot_nb_dim <= sum(nb_dim)");

  for (std::size_t f = 0; f < low.nb_dim.size(); ++f) {
    const auto tag = "[" + std::to_string(f) + "]";
    if (low.nb_dim[f] < 1) fail("nb_dim" + tag + " >= 1");
    if (low.nb_dim[f] > low.tot_nb_dim) fail("nb_dim" + tag + " <= tot_nb_dim");
  }
  for (std::size_t f = 0; f < low.nb_meas.size(); ++f) {
    if (low.nb_meas[f] < 1) fail("nb_meas[" + std::to_string(f) + "] >= 1");
  }
  for (std::size_t f = 0; f < low.density.size(); ++f) {
    const double v = low.density[f];
    if (!(v > 0.0 && v <= 1.0)) fail("density[" + std::to_string(f) + "] in (0,1]");
  }
  for (std::size_t d = 0; d < low.nb_levels.size(); ++d) {
    const auto tag = "[" + std::to_string(d) + "]";
    if (low.nb_levels[d] < 1) fail("nb_levels" + tag + " >= 1");
    if (d < low.nb_att.size()) {
      if (low.nb_att[d].size() != low.nb_levels[d]) fail("nb_att" + tag + " has one entry per level");
      for (auto a : low.nb_att[d]) {
        if (a < 1) fail("nb_att" + tag + " >= 1");
      }
    }
  }
  for (std::size_t d = 0; d < low.hhlevel_size.size(); ++d) {
    if (low.hhlevel_size[d] < 1) fail("hhlevel_size[" + std::to_string(d) + "] >= 1");
  }
  for (std::size_t d = 0; d < low.dim_sfactor.size(); ++d) {
    if (!(low.dim_sfactor[d] > 0.0)) fail("dim_sfactor[" + std::to_string(d) + "] > 0");
  }
  return r;
}

inline ValidationReport validate_params(const HighLevelParams& h) {
  ValidationReport r;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) r.violations.push_back(std::string(name) + " > 0");
  };
  positive(h.avg_nb_ft, "NB_FT");
  positive(h.avg_nb_dim, "AVG_NB_DIM");
  positive(h.avg_tot_nb_dim, "AVG_TOT_NB_DIM");
  positive(h.avg_nb_meas, "AVG_NB_MEAS");
  positive(h.avg_nb_levels, "AVG_NB_LEVELS");
  positive(h.avg_nb_att, "AVG_NB_ATT");
  positive(h.avg_hhlevel_size, "AVG_HHLEVEL_SIZE");
  positive(h.dim_sfactor, "DIM_SFACTOR");
  if (!(h.avg_density > 0.0 && h.avg_density <= 1.0)) r.violations.push_back("AVG_DENSITY in (0,1]");
  if (!(h.sigma_ratio >= 0.0)) r.violations.push_back("SIGMA_RATIO >= 0");
  return r;
}

// ---------------------------------------------------------------------------
// key=value configuration files
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view text, std::string_view key, std::size_t line) {
  double v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("invalid number '" + std::string(text) + "' for " + std::string(key), line);
  }
  return v;
}

inline std::uint64_t parse_u64(std::string_view text, std::string_view key, std::size_t line) {
  std::uint64_t v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("invalid integer '" + std::string(text) + "' for " + std::string(key), line);
  }
  return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line;
};

/// Parses "KEY=VALUE" lines; '#' starts a comment line.
inline std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected KEY=VALUE", line);
    auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", line);
    out.push_back({std::string(key), std::string(value), line});
  }
  return out;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace detail

/// Names accepted in a configuration file. Derived parameters (PROB_EXTRACT,
/// PROB_ROLLUP, FRR, MR) are computed and rejected if present.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "NB_FT",        "AVG_NB_DIM",    "AVG_TOT_NB_DIM", "AVG_NB_MEAS",  "AVG_DENSITY",
      "AVG_NB_LEVELS", "AVG_NB_ATT",   "AVG_HHLEVEL_SIZE", "DIM_SFACTOR", "NB_Q",
      "Q_AVG_NB_ATT", "AVG_NB_RESTR",  "PROB_OLAP",      "AVG_NB_AGGREG", "PROB_CUBE",
      "PROB_HAVING",  "AVG_NB_DD",     "GRR",            "DRR",          "IR",
      "REPN",         "SEED",          "SIGMA_RATIO"};
  return keys;
}

inline void apply_config_value(ParameterSet& p, std::string_view key, std::string_view value,
                               std::size_t line = 0) {
  using detail::parse_double;
  using detail::parse_u64;
  auto prob = [&](double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParseError(std::string(key) + " must be a probability in [0,1]", line);
    }
    return v;
  };
  auto pos = [&](double v) {
    if (!(v > 0.0)) throw ParseError(std::string(key) + " must be > 0", line);
    return v;
  };
  auto& w = p.warehouse;
  auto& q = p.workload;
  if (key == "NB_FT" || key == "AVG_NB_FT") w.avg_nb_ft = pos(parse_double(value, key, line));
  else if (key == "AVG_NB_DIM") w.avg_nb_dim = pos(parse_double(value, key, line));
  else if (key == "AVG_TOT_NB_DIM") w.avg_tot_nb_dim = pos(parse_double(value, key, line));
  else if (key == "AVG_NB_MEAS") w.avg_nb_meas = pos(parse_double(value, key, line));
  else if (key == "AVG_DENSITY") {
    const double v = parse_double(value, key, line);
    if (!(v > 0.0 && v <= 1.0)) throw ParseError("AVG_DENSITY must be in (0,1]", line);
    w.avg_density = v;
  } else if (key == "AVG_NB_LEVELS") w.avg_nb_levels = pos(parse_double(value, key, line));
  else if (key == "AVG_NB_ATT") w.avg_nb_att = pos(parse_double(value, key, line));
  else if (key == "AVG_HHLEVEL_SIZE") w.avg_hhlevel_size = pos(parse_double(value, key, line));
  else if (key == "DIM_SFACTOR") w.dim_sfactor = pos(parse_double(value, key, line));
  else if (key == "SIGMA_RATIO") {
    const double v = parse_double(value, key, line);
    if (!(v >= 0.0)) throw ParseError("SIGMA_RATIO must be >= 0", line);
    w.sigma_ratio = v;
  } else if (key == "NB_Q") {
    q.nb_q = parse_u64(value, key, line);
    if (q.nb_q < 1) throw ParseError("NB_Q must be >= 1", line);
  } else if (key == "Q_AVG_NB_ATT") q.q_avg_nb_att = pos(parse_double(value, key, line));
  else if (key == "AVG_NB_RESTR") q.avg_nb_restr = pos(parse_double(value, key, line));
  else if (key == "PROB_OLAP") q.prob_olap = prob(parse_double(value, key, line));
  else if (key == "AVG_NB_AGGREG") q.avg_nb_aggreg = pos(parse_double(value, key, line));
  else if (key == "PROB_CUBE") q.prob_cube = prob(parse_double(value, key, line));
  else if (key == "PROB_HAVING") q.prob_having = prob(parse_double(value, key, line));
  else if (key == "AVG_NB_DD") q.avg_nb_dd = pos(parse_double(value, key, line));
  else if (key == "GRR") p.etl.grr = prob(parse_double(value, key, line));
  else if (key == "DRR") p.etl.drr = prob(parse_double(value, key, line));
  else if (key == "IR") p.etl.ir = prob(parse_double(value, key, line));
  else if (key == "REPN") p.protocol.repn = parse_u64(value, key, line);
  else if (key == "SEED") p.seed = parse_u64(value, key, line);
  else if (key == "PROB_EXTRACT" || key == "PROB_ROLLUP" || key == "FRR" || key == "MR") {
    throw ParseError(std::string(key) + " is derived and cannot be set", line);
  } else {
    throw ParseError("unknown parameter " + std::string(key), line);
  }
}

inline ParameterSet read_config(std::istream& in) {
  ParameterSet p;
  for (const auto& kv : detail::parse_key_values(in)) apply_config_value(p, kv.key, kv.value, kv.line);
  return p;
}

inline ParameterSet read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return read_config(in);
}

inline void write_config(std::ostream& out, const ParameterSet& p) {
  using detail::format_double;
  const auto& w = p.warehouse;
  const auto& q = p.workload;
  out << "# warehouse\n"
      << "NB_FT=" << format_double(w.avg_nb_ft) << '\n'
      << "AVG_NB_DIM=" << format_double(w.avg_nb_dim) << '\n'
      << "AVG_TOT_NB_DIM=" << format_double(w.avg_tot_nb_dim) << '\n'
      << "AVG_NB_MEAS=" << format_double(w.avg_nb_meas) << '\n'
      << "AVG_DENSITY=" << format_double(w.avg_density) << '\n'
      << "AVG_NB_LEVELS=" << format_double(w.avg_nb_levels) << '\n'
      << "AVG_NB_ATT=" << format_double(w.avg_nb_att) << '\n'
      << "AVG_HHLEVEL_SIZE=" << format_double(w.avg_hhlevel_size) << '\n'
      << "DIM_SFACTOR=" << format_double(w.dim_sfactor) << '\n'
      << "SIGMA_RATIO=" << format_double(w.sigma_ratio) << '\n'
      << "# workload\n"
      << "NB_Q=" << q.nb_q << '\n'
      << "Q_AVG_NB_ATT=" << format_double(q.q_avg_nb_att) << '\n'
      << "AVG_NB_RESTR=" << format_double(q.avg_nb_restr) << '\n'
      << "PROB_OLAP=" << format_double(q.prob_olap) << '\n'
      << "AVG_NB_AGGREG=" << format_double(q.avg_nb_aggreg) << '\n'
      << "PROB_CUBE=" << format_double(q.prob_cube) << '\n'
      << "PROB_HAVING=" << format_double(q.prob_having) << '\n'
      << "AVG_NB_DD=" << format_double(q.avg_nb_dd) << '\n'
      << "# refresh\n"
      << "GRR=" << format_double(p.etl.grr) << '\n'
      << "DRR=" << format_double(p.etl.drr) << '\n'
      << "IR=" << format_double(p.etl.ir) << '\n'
      << "# protocol\n"
      << "REPN=" << p.protocol.repn << '\n'
      << "SEED=" << p.seed << '\n';
}

// ---------------------------------------------------------------------------
// Low-level override file
//
//   NB_FT=1
//   TOT_NB_DIM=2
//   NB_DIM=2               one value per fact table, comma separated
//   NB_MEAS=2
//   DENSITY=1
//   NB_LEVELS=2,2          one value per dimension
//   NB_ATT=1,1;1,1         per dimension (';'), per level finest first (',')
//   HHLEVEL_SIZE=2,2
//   DIM_SFACTOR=2,2
// ---------------------------------------------------------------------------

inline LowLevelParams read_low_level(std::istream& in) {
  LowLevelParams low;
  bool have_ft = false;
  bool have_dims = false;
  auto counts = [](std::string_view v, std::string_view key, std::size_t line) {
    std::vector<std::size_t> out;
    for (auto part : detail::split(v, ',')) out.push_back(detail::parse_u64(part, key, line));
    return out;
  };
  auto reals = [](std::string_view v, std::string_view key, std::size_t line) {
    std::vector<double> out;
    for (auto part : detail::split(v, ',')) out.push_back(detail::parse_double(part, key, line));
    return out;
  };
  for (const auto& kv : detail::parse_key_values(in)) {
    const std::string_view v = kv.value;
    if (kv.key == "NB_FT") {
      low.nb_ft = detail::parse_u64(v, kv.key, kv.line);
      have_ft = true;
    } else if (kv.key == "TOT_NB_DIM") {
      low.tot_nb_dim = detail::parse_u64(v, kv.key, kv.line);
      have_dims = true;
    } else if (kv.key == "NB_DIM") low.nb_dim = counts(v, kv.key, kv.line);
    else if (kv.key == "NB_MEAS") low.nb_meas = counts(v, kv.key, kv.line);
    else if (kv.key == "DENSITY") low.density = reals(v, kv.key, kv.line);
    else if (kv.key == "NB_LEVELS") low.nb_levels = counts(v, kv.key, kv.line);
    else if (kv.key == "NB_ATT") {
      low.nb_att.clear();
      for (auto row : detail::split(v, ';')) low.nb_att.push_back(counts(row, kv.key, kv.line));
    } else if (kv.key == "HHLEVEL_SIZE") low.hhlevel_size = counts(v, kv.key, kv.line);
    else if (kv.key == "DIM_SFACTOR") low.dim_sfactor = reals(v, kv.key, kv.line);
    else throw ParseError("unknown low-level parameter " + kv.key, kv.line);
  }
  if (!have_ft || !have_dims) throw ConfigError("low-level file must set NB_FT and TOT_NB_DIM");
  return low;
}

inline LowLevelParams read_low_level_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open low-level parameter file " + path);
  return read_low_level(in);
}

inline void write_low_level(std::ostream& out, const LowLevelParams& low) {
  auto join = [](const auto& values) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
        s += detail::format_double(values[i]);
      } else {
        s += std::to_string(values[i]);
      }
    }
    return s;
  };
  out << "NB_FT=" << low.nb_ft << '\n'
      << "TOT_NB_DIM=" << low.tot_nb_dim << '\n'
      << "NB_DIM=" << join(low.nb_dim) << '\n'
      << "NB_MEAS=" << join(low.nb_meas) << '\n'
      << "DENSITY=" << join(low.density) << '\n'
      << "NB_LEVELS=" << join(low.nb_levels) << '\n'
      << "NB_ATT=";
  for (std::size_t d = 0; d < low.nb_att.size(); ++d) {
    if (d) out << ';';
    out << join(low.nb_att[d]);
  }
  out << '\n'
      << "HHLEVEL_SIZE=" << join(low.hhlevel_size) << '\n'
      << "DIM_SFACTOR=" << join(low.dim_sfactor) << '\n';
}

}  // namespace dweb
