// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fairprio/corpus.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/text.hpp"

namespace fairprio::fx {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(FAIRPRIO_SOURCE_DIR) / rel;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("fairprio-test-" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline corpus::SourceTestCase annotated(const std::string& id, const std::string& text) {
  return {id, text, corpus::annotate_attributes(text, corpus::SensitiveAttributeTable::builtin())};
}

inline mr::TestPair pair_of(const std::string& source, const std::string& follow_up, int mr = 1,
                            const std::string& id = "c1") {
  return {MrId(mr), annotated(id, source), follow_up, ""};
}

/// Random lowercase string over a small alphabet, so edits collide often.
inline std::string random_string(text::SeededRng& rng, std::size_t max_len,
                                 std::string_view alphabet = "abcd") {
  const std::size_t n = rng.index(max_len + 1);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += alphabet[rng.index(alphabet.size())];
  return s;
}

/// Random prompt-like text mixing attribute values, sentiment and emotion
/// words, filler and punctuation. May be empty.
inline std::string random_text(text::SeededRng& rng) {
  static const std::vector<std::string> words = {
      "the", "a", "nurse", "engineer", "female", "male", "young", "elderly", "Asian", "Hispanic",
      "Native American", "Muslim", "Christian", "gay", "wealthy", "poor", "disabled", "happy",
      "terrible", "love", "hate", "afraid", "angry", "surprised", "not", "never", "great", "awful",
      "write", "describe", "explain", "for", "of", "who", "is", "clearly", "loan", "application",
      "2026", "x", "?", ",", ".", "!", "-", "Ünïcode", "  "};
  const std::size_t n = rng.index(25);
  std::string s;
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.empty() && rng.index(5) != 0) s += ' ';
    s += words[rng.index(words.size())];
  }
  return s;
}

}  // namespace fairprio::fx
