// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 KGQuest Contributors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kgquest {

std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

// ASCII-only lowercase; multi-byte UTF-8 sequences pass through unchanged so
// byte offsets are preserved.
std::string ascii_lower(std::string_view s);

bool starts_with_ci(std::string_view s, std::string_view prefix);

// Well-formed UTF-8 check (rejects overlongs and surrogates).
bool is_valid_utf8(std::string_view s);

// Bytes >= 0x80 count as word characters, so accented letters stay inside tokens.
inline bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

struct TokenSpan {
  std::size_t begin;
  std::size_t end;
};

// Maximal runs of word bytes.
std::vector<TokenSpan> word_tokens(std::string_view s);

// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Hash of several fields, each length-prefixed so ("ab","c") != ("a","bc").
std::uint64_t hash_fields(std::initializer_list<std::string_view> fields);

std::string hex64(std::uint64_t v);

}  // namespace kgquest
