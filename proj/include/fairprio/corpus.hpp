// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairprio::corpus {

/// Gazetteer of sensitive attributes: category name -> ordered surface
/// values, plus a contrast map pairing each value with its designated
/// opposite inside the same category.
///
/// Values are unique across the whole table after case folding, so a value
/// identifies its category.
class SensitiveAttributeTable {
 public:
  using Category = std::pair<std::string, std::vector<std::string>>;

  /// Builds and validates a table. When `contrast` is empty (or misses a
  /// category) the default pairing is used: adjacent pairs (0<->1, 2<->3...)
  /// for even-sized categories, cyclic-next for odd-sized ones.
  /// Throws ValidationError on any broken invariant.
  SensitiveAttributeTable(std::vector<Category> categories,
                          std::map<std::string, std::string> contrast = {});

  /// Table shipped with the library: eight base categories extended
  /// with GENDER, AGE and NATIONALITY.
  static const SensitiveAttributeTable& builtin();

  /// Gazetteer file: JSON object category -> array of values, with an
  /// optional "contrast" object value -> value.
  static SensitiveAttributeTable from_json(std::string_view json_text);
  static SensitiveAttributeTable load(const std::filesystem::path& path);
  std::string to_json() const;

  const std::vector<Category>& categories() const noexcept { return categories_; }
  bool has_category(std::string_view name) const;
  const std::vector<std::string>& values(std::string_view category) const;

  /// Category of a value (case-insensitive), if the value is known.
  std::optional<std::string> category_of(std::string_view value) const;
  /// Canonical spelling of a value (case-insensitive lookup).
  std::optional<std::string> canonical(std::string_view value) const;
  /// Contrasting value. Throws ValidationError for unknown values.
  const std::string& contrast(std::string_view value) const;

  /// Every value paired with its category, longest first (ties by category
  /// order, then value order). This is the match priority for annotation.
  const std::vector<std::pair<std::string, std::string>>& by_length() const noexcept {
    return by_length_;
  }

 private:
  std::vector<Category> categories_;
  std::map<std::string, std::string> contrast_;   // folded -> canonical
  std::map<std::string, std::string> category_;   // folded -> category
  std::map<std::string, std::string> canonical_;  // folded -> canonical
  std::vector<std::pair<std::string, std::string>> by_length_;
};

struct AttributeSpan {
  std::string category;
  std::string value;
  std::size_t start = 0;  // inclusive byte offset
  std::size_t end = 0;    // exclusive

  friend bool operator==(const AttributeSpan&, const AttributeSpan&) = default;
};

struct SourceTestCase {
  std::string id;
  std::string text;
  std::vector<AttributeSpan> attributes;

  friend bool operator==(const SourceTestCase&, const SourceTestCase&) = default;
};

/// All non-overlapping, leftmost-longest, case-insensitive whole-word
/// occurrences of gazetteer values, sorted by start offset.
std::vector<AttributeSpan> annotate_attributes(std::string_view text,
                                               const SensitiveAttributeTable& table);

/// Checks the AttributeSpan and SourceTestCase invariants against `table`.
/// Throws ValidationError naming the case.
void validate_case(const SourceTestCase& c, const SensitiveAttributeTable& table);

/// Parses a JSONL corpus. Records without "attributes" are annotated.
std::vector<SourceTestCase> parse_corpus(std::string_view jsonl,
                                         const SensitiveAttributeTable& table);
std::vector<SourceTestCase> load_corpus(const std::filesystem::path& path,
                                        const SensitiveAttributeTable& table);

/// One JSON object per line, attributes always written.
std::string format_corpus(const std::vector<SourceTestCase>& cases);
void save_corpus(const std::filesystem::path& path,
                 const std::vector<SourceTestCase>& cases);

/// Fills `{CATEGORY}` placeholders with every combination of values of the
/// listed slots, in a seeded order. `max_cases` caps the number of
/// combinations drawn (0 = all). Ids are `<id_prefix>-<slug of values>` and
/// do not depend on the seed.
std::vector<SourceTestCase> expand_templates(std::string_view template_text,
                                             const SensitiveAttributeTable& table,
                                             const std::vector<std::string>& slots,
                                             std::uint64_t seed,
                                             std::string_view id_prefix = "tpl",
                                             std::size_t max_cases = 0);

/// A pending replacement of text[pos, pos + length).
struct TextEdit {
  std::size_t pos = 0;
  std::size_t length = 0;
  std::string replacement;
};

/// "a" or "an" for the given following word.
std::string_view indefinite_article(std::string_view next_word);

/// The edit that makes an "a"/"an" (any case) right before byte offset `pos`
/// agree with the word starting at `pos`, if one is needed.
std::optional<TextEdit> article_fix(std::string_view text, std::size_t pos);

/// Applies article_fix in place. Returns the size delta applied to the text
/// (offsets at or after `pos` shift by it).
std::ptrdiff_t fix_article_before(std::string& text, std::size_t pos);

}  // namespace fairprio::corpus
