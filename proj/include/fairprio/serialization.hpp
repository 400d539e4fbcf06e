// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fairprio/corpus.hpp"
#include "fairprio/diversity.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/outcome_matrix.hpp"
#include "fairprio/prioritizer.hpp"

// On-disk formats of the pipeline artifacts. Every writer emits a fixed key
// order and a trailing newline so reruns are byte-identical.
namespace fairprio::io {

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary file and rename, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view content);

/// One pair per line: mr_id, case_id, source, source_attributes,
/// follow_up, note.
std::string pairs_to_jsonl(const std::vector<mr::TestPair>& pairs);
std::vector<mr::TestPair> pairs_from_jsonl(std::string_view jsonl);

/// {"MR1": [{"case_id", "reason"}...], ...}
std::string skips_to_json(const std::vector<mr::DerivedPairs>& derived);

/// {strategy, sequence, scores, seed}
nlohmann::ordered_json ordering_to_json(const prioritizer::Ordering& o);
prioritizer::Ordering ordering_from_json(const nlohmann::json& j);

/// {strategy: "random", seed, count, orderings: [[ids]...]}
nlohmann::ordered_json random_orderings_to_json(const std::vector<prioritizer::Ordering>& set);
std::vector<prioritizer::Ordering> random_orderings_from_json(const nlohmann::json& j);

/// {mr_ids, case_ids, rows: ["PVS E..."]} with one character per cell:
/// P pass, V violation, S skipped, E errored.
nlohmann::ordered_json matrix_to_json(const prioritizer::OutcomeMatrix& m);
prioritizer::OutcomeMatrix matrix_from_json(const nlohmann::json& j);

/// Per-MR breakdown, FDS and per-pair values.
nlohmann::ordered_json scores_to_json(const std::vector<diversity::MrScore>& scores);

/// Pretty JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

}  // namespace fairprio::io
