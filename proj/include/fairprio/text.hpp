// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// ASCII text helpers shared by the corpus, analyzer and MR modules. Bytes
// outside ASCII are treated as non-word characters.
namespace fairprio::text {

inline bool is_word_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

inline char lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string casefold(std::string_view s);
bool iequals(std::string_view a, std::string_view b) noexcept;
std::string trim(std::string_view s);

/// Uppercases the first letter if it is a lowercase ASCII letter.
std::string capitalize_first(std::string_view s);

/// FNV-1a over the bytes, finalized with splitmix64. Stable across platforms.
std::uint64_t hash64(std::string_view s, std::uint64_t seed = 0) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Small deterministic generator. The standard distributions are
/// implementation-defined, so every seeded choice in the library goes
/// through this type instead.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return splitmix64(state_);
  }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) noexcept;

 private:
  std::uint64_t state_;
};

}  // namespace fairprio::text
