// tests/test_util.cpp

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

#include <atomic>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "easr/util.h"
#include "test_support.h"

using namespace easr;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("rng is seed deterministic and in range") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  Rng r(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_below(7);
    CHECK(v < 7);
    seen.insert(v);
    const auto w = r.uniform_int(-3, 3);
    CHECK(w >= -3);
    CHECK(w <= 3);
    const double u = r.uniform_real();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("parallel_for visits each index once and rethrows the lowest failure") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (auto& h : hits) CHECK(h.load() == 1);

  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 17");
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("called"); });
}

TEST_CASE("with_retries makes retries + 1 attempts") {
  int calls = 0;
  CHECK_THROWS_AS(with_retries(2, std::chrono::milliseconds(0),
                               [&](int) -> int {
                                 ++calls;
                                 throw std::runtime_error("x");
                               }),
                  std::runtime_error);
  CHECK(calls == 3);
  calls = 0;
  const int v = with_retries(5, std::chrono::milliseconds(0), [&](int attempt) {
    ++calls;
    if (attempt < 2) throw std::runtime_error("x");
    return attempt;
  });
  CHECK(v == 2);
  CHECK(calls == 3);
}

TEST_CASE("atomic_write_file replaces contents") {
  testing::TempDir dir;
  const auto p = dir / "a.txt";
  atomic_write_file(p, "one");
  atomic_write_file(p, "two");
  CHECK(read_file(p) == "two");
  CHECK(std::distance(std::filesystem::directory_iterator(dir.path()),
                      std::filesystem::directory_iterator()) == 1);
}

TEST_CASE("text helpers") {
  CHECK(trim("  a b \n") == "a b");
  CHECK(split_whitespace(" a\tb  c\n") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_whitespace("   ").empty());
  CHECK(format_utc(0) == "1970-01-01T00:00:00Z");
  CHECK(format_utc(1700000000) == "2023-11-14T22:13:20Z");
}
