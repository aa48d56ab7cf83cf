// include/easr/util.h

// Copyright 2026 The easraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef EASR_UTIL_H_
#define EASR_UTIL_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace easr {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// SHA-256 of a file's bytes; throws DataError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Small deterministic generator (SplitMix64). Unlike the distributions in
/// <random>, its output is identical across standard library vendors, which
/// keeps seeded selections and masks reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform real in [0, 1).
  double uniform_real();

 private:
  std::uint64_t state_;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. workers <= 0 means
/// one per hardware thread. Exceptions are collected and the one raised by
/// the smallest index is rethrown after all workers stop.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

int resolve_workers(int workers);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file then renames over `path`.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view contents);

std::string_view trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);

/// Seconds since the epoch honoring SOURCE_DATE_EPOCH when set.
std::int64_t current_epoch_seconds();
std::string format_utc(std::int64_t epoch_seconds);

/// Retry helper: calls fn up to retries + 1 times, sleeping
/// base_delay * 2^k between attempts. Rethrows the last failure.
template <typename Fn>
auto with_retries(int retries, std::chrono::milliseconds base_delay, Fn&& fn)
    -> decltype(fn(0));

void sleep_for_backoff(std::chrono::milliseconds base_delay, int attempt);

template <typename Fn>
auto with_retries(int retries, std::chrono::milliseconds base_delay, Fn&& fn)
    -> decltype(fn(0)) {
  for (int attempt = 0;; ++attempt) {
    try {
      return fn(attempt);
    } catch (...) {
      if (attempt >= retries) throw;
    }
    sleep_for_backoff(base_delay, attempt);
  }
}

}  // namespace easr

#endif  // EASR_UTIL_H_
