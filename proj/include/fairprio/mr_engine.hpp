// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairprio/corpus.hpp"
#include "fairprio/mr_id.hpp"

namespace fairprio::mr {

enum class MrCategory {
  removal,
  negation,
  addition,
  shuffling,
  substitution,
  paraphrasing,
  concatenation,
};
std::string_view to_string(MrCategory c) noexcept;

struct MrDefinition {
  MrId id;
  MrCategory category;
  std::string name;
  std::string description;
};

/// The eleven relations MR1..MR11, in id order.
const std::vector<MrDefinition>& registry();
/// Throws ValidationError for ids outside the registry.
const MrDefinition& definition(MrId id);

/// Rewrite tables behind the rule-based transformations. Template strings
/// understand {value}, {a} (article for the value), {be} and {s} (agreement
/// with the head noun).
struct MrTemplates {
  std::vector<std::string> mr8_axis;
  std::vector<std::string> mr10_axis;
  std::map<std::string, std::string> insertion;      // category -> post-nominal modifier
  std::string reorder;                                // post-nominal form for MR7
  std::map<std::string, std::string> concatenation;  // category -> appended sentence
  std::map<std::string, std::string> synonyms;       // folded phrase -> replacement
  std::set<std::string> fronting_prepositions;
  std::set<std::string> imperative_verbs;
  std::map<std::string, std::string> reframe;  // question / imperative / statement
  std::set<std::string> person_nouns;
  std::map<std::string, std::string> neutral;  // category -> stand-in when removing an object

  /// Tables shipped with the library.
  static const MrTemplates& builtin();
  /// Parses a template file. Keys present in the file replace the
  /// corresponding tables of `base`; absent keys keep the base tables.
  static MrTemplates from_json(std::string_view json_text, const MrTemplates& base = builtin());
  static MrTemplates load(const std::string& path, const MrTemplates& base = builtin());
};

struct TestPair {
  MrId mr_id;
  corpus::SourceTestCase source;
  std::string follow_up_text;
  std::string transform_note;

  friend bool operator==(const TestPair&, const TestPair&) = default;
};

struct Inapplicable {
  std::string reason;
};

using MrOutcome = std::variant<TestPair, Inapplicable>;

/// Applies one relation to one annotated case. Deterministic in
/// (mr, case, table, seed, templates); every seeded choice draws from a
/// generator keyed by the seed, the MR number and the case id, so results
/// do not depend on corpus order.
MrOutcome apply_mr(const MrDefinition& mr, const corpus::SourceTestCase& source,
                   const corpus::SensitiveAttributeTable& table, std::uint64_t seed,
                   const MrTemplates& templates = MrTemplates::builtin());

struct SkipRecord {
  std::string case_id;
  std::string reason;

  friend bool operator==(const SkipRecord&, const SkipRecord&) = default;
};

struct DerivedPairs {
  MrId mr_id;
  std::vector<TestPair> pairs;
  std::vector<SkipRecord> skipped;
};

/// One pair per applicable case, corpus order preserved. Throws
/// ValidationError for an empty corpus.
DerivedPairs derive_pairs(const MrDefinition& mr,
                          const std::vector<corpus::SourceTestCase>& cases,
                          const corpus::SensitiveAttributeTable& table, std::uint64_t seed,
                          const MrTemplates& templates = MrTemplates::builtin());

// Individual rewrite steps, used by apply_mr and exposed for tests.

/// Removes the given spans (any order) with comma, whitespace, article and
/// capitalization repair. A span that is itself a person noun becomes
/// "person" ("people") instead, and a span in object position ("practices
/// Islam") becomes its category's neutral stand-in when one is defined.
std::string remove_spans(std::string_view text, std::vector<corpus::AttributeSpan> spans,
                         const MrTemplates& templates = MrTemplates::builtin());

/// Replaces span values. `replacements[i]` is the new value of `spans[i]`.
/// Gendered pronouns are swapped when a GENDER span changes.
std::string replace_spans(std::string_view text, const std::vector<corpus::AttributeSpan>& spans,
                          const std::vector<std::string>& replacements);

/// Inserts the category's post-nominal modifier after a person noun: the
/// head of the first annotated attribute that has one, else the first
/// person noun introduced by a determiner. nullopt when there is no site.
std::optional<std::string> insert_attribute(const corpus::SourceTestCase& c,
                                            const std::string& category, const std::string& value,
                                            const MrTemplates& templates);

/// Appends the category's clause sentence.
std::string append_attribute_clause(std::string_view text, const std::string& category,
                                    const std::string& value, const MrTemplates& templates);

}  // namespace fairprio::mr
