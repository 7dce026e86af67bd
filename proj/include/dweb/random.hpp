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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "dweb/error.hpp"

namespace dweb {

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic random stream.
///
/// The engine is mt19937_64, whose output sequence is fixed by the standard.
/// Distributions are implemented here rather than taken from <random>, since
/// the standard leaves their algorithms to the implementation.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Independent stream for one purpose. Depends only on (seed, tag), so
  /// outputs of one module never depend on how many draws another made.
  SeededRng substream(std::string_view tag) const {
    return SeededRng(detail::splitmix64(seed_ ^ detail::fnv1a64(tag)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (no cached second variate).
  double next_standard_normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1]
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Round-half-up.
inline double round_half_up(double x) { return std::floor(x + 0.5); }

/// Uniform real in [low, high). Degenerate range returns low.
inline double uniform_float(SeededRng& rng, double low, double high) {
  if (!(low <= high)) {
    throw ConfigError("uniform_float: invalid range [" + std::to_string(low) + ", " +
                      std::to_string(high) + ")");
  }
  if (low == high) return low;
  const double v = low + (high - low) * rng.next_unit();
  return v < high ? v : std::nextafter(high, low);
}

inline double gaussian(SeededRng& rng, double mean, double stdev) {
  return mean + stdev * rng.next_standard_normal();
}

inline bool bernoulli(SeededRng& rng, double p) { return rng.next_unit() < p; }

/// Uniform integer in [low, high].
inline std::int64_t uniform_int(SeededRng& rng, std::int64_t low, std::int64_t high) {
  if (low > high) throw ConfigError("uniform_int: invalid range");
  const auto span = static_cast<double>(high - low) + 1.0;
  const auto offset = static_cast<std::int64_t>(std::floor(rng.next_unit() * span));
  return std::min(low + offset, high);
}

/// round(N(avg, sigma_ratio * avg)) clamped to >= 1.
inline std::int64_t gauss_int(SeededRng& rng, double avg, double sigma_ratio) {
  const double draw = sigma_ratio > 0.0 ? gaussian(rng, avg, sigma_ratio * avg) : avg;
  const double r = round_half_up(draw);
  if (!(r >= 1.0)) return 1;
  if (r > 1e15) return static_cast<std::int64_t>(1e15);
  return static_cast<std::int64_t>(r);
}

/// Gaussian-skewed index into a list of n candidates: centered on the middle
/// element, stdev n/6, rounded and clamped to [0, n).
inline std::size_t gaussian_index(SeededRng& rng, std::size_t n) {
  if (n == 0) throw EmptyDomainError("gaussian_index: empty candidate list");
  if (n == 1) return 0;
  const double center = static_cast<double>(n - 1) / 2.0;
  const double r = round_half_up(gaussian(rng, center, static_cast<double>(n) / 6.0));
  return static_cast<std::size_t>(std::clamp(r, 0.0, static_cast<double>(n - 1)));
}

/// Skewed pick of an existing primary key in [1, extension_size].
inline std::int64_t random_key(SeededRng& rng, std::int64_t extension_size) {
  if (extension_size <= 0) throw EmptyDomainError("random_key: empty table");
  const double size = static_cast<double>(extension_size);
  const double r = round_half_up(gaussian(rng, size / 2.0, size / 6.0));
  return static_cast<std::int64_t>(std::clamp(r, 1.0, size));
}

/// Skewed pick among dimensions [0, total) not already in `attached`.
inline std::size_t random_dimension(SeededRng& rng, std::size_t total,
                                    std::span<const std::size_t> attached) {
  std::vector<std::size_t> free;
  free.reserve(total);
  for (std::size_t d = 0; d < total; ++d) {
    if (std::find(attached.begin(), attached.end(), d) == attached.end()) free.push_back(d);
  }
  if (free.empty()) throw EmptyDomainError("random_dimension: all dimensions already attached");
  return free[gaussian_index(rng, free.size())];
}

/// Precomputed pool of distinct fixed-size strings used for member values.
class StringReferential {
 public:
  static constexpr std::size_t kStringLength = 20;
  static constexpr std::size_t kDefaultPoolSize = 1000;

  static StringReferential build(SeededRng rng, std::size_t pool_size = kDefaultPoolSize) {
    static constexpr std::string_view kAlphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    if (pool_size == 0) throw ConfigError("string referential: pool size must be >= 1");
    std::vector<std::string> pool;
    std::unordered_set<std::string> seen;
    pool.reserve(pool_size);
    while (pool.size() < pool_size) {
      std::string s(kStringLength, ' ');
      for (auto& c : s) c = kAlphabet[rng.next_u64() % kAlphabet.size()];
      if (seen.insert(s).second) pool.push_back(std::move(s));
    }
    return StringReferential(std::move(pool));
  }

  std::size_t size() const noexcept { return pool_.size(); }
  const std::string& entry(std::size_t i) const { return pool_.at(i); }
  std::span<const std::string> entries() const noexcept { return pool_; }

 private:
  explicit StringReferential(std::vector<std::string> pool) : pool_(std::move(pool)) {}

  std::vector<std::string> pool_;
};

/// attribute + "_" + skewed pool entry.
inline std::string random_string(SeededRng& rng, const StringReferential& ref,
                                 std::string_view attribute) {
  const auto& suffix = ref.entry(gaussian_index(rng, ref.size()));
  std::string out;
  out.reserve(attribute.size() + 1 + suffix.size());
  out.append(attribute).append("_").append(suffix);
  return out;
}

/// Stream tags; one per consumer so streams stay independent.
namespace stream {
inline constexpr std::string_view kLowLevel = "low-level";
inline constexpr std::string_view kSchema = "schema";
inline constexpr std::string_view kReferential = "referential";
inline constexpr std::string_view kData = "data";
inline constexpr std::string_view kWorkload = "workload";
inline constexpr std::string_view kRefresh = "refresh";
}  // namespace stream

}  // namespace dweb
