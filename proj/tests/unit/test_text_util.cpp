// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "kgquest/seeded_random.hpp"
#include "kgquest/text_util.hpp"

using namespace kgquest;

TEST_SUITE("text_util") {

TEST_CASE("trim and split") {
  CHECK(trim("  a b \t") == "a b");
  CHECK(trim("") == "");
  auto parts = split("a\t\tb", '\t');
  REQUIRE(parts.size() == 3);
  CHECK(parts[1].empty());
}

TEST_CASE("ascii_lower leaves multibyte sequences alone") {
  CHECK(ascii_lower("ÉmILE") == "Émile");
  CHECK(starts_with_ci("Question: x", "question:"));
}

TEST_CASE("utf8 validation") {
  CHECK(is_valid_utf8("Émile Durkheim"));
  CHECK_FALSE(is_valid_utf8("\xC3"));
  CHECK_FALSE(is_valid_utf8("\xC0\xAF"));          // overlong '/'
  CHECK_FALSE(is_valid_utf8("\xED\xA0\x80"));      // surrogate
}

TEST_CASE("word tokens keep accented letters inside a token") {
  std::string s = "Émile, Durkheim!";
  auto toks = word_tokens(s);
  REQUIRE(toks.size() == 2);
  CHECK(s.substr(toks[0].begin, toks[0].end - toks[0].begin) == "Émile");
}

TEST_CASE("fnv1a64 reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("hash_fields is length-prefixed") {
  CHECK(hash_fields({"ab", "c"}) != hash_fields({"a", "bc"}));
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("SeededRng is reproducible and bounded") {
  SeededRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  SeededRng r(7);
  std::map<std::uint64_t, int> seen;
  for (int i = 0; i < 7000; ++i) {
    auto x = r.below(7);
    REQUIRE(x < 7);
    ++seen[x];
  }
  CHECK(seen.size() == 7);
  for (auto& [k, n] : seen) CHECK(n > 800);
}

TEST_CASE("shuffle is a permutation") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  SeededRng r(3);
  r.shuffle(std::span<int>(v));
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}

}
