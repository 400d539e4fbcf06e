// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairprio/mr_engine.hpp"
#include "fairprio/mr_id.hpp"
#include "fairprio/diversity.hpp"
#include "fairprio/outcome_matrix.hpp"

namespace fairprio::prioritizer {

enum class Strategy { diversity, distance, fault, random };
std::string_view to_string(Strategy s) noexcept;
Strategy parse_strategy(std::string_view s);

struct Ordering {
  Strategy strategy = Strategy::diversity;
  std::vector<MrId> sequence;
  std::map<MrId, double> scores;
  std::optional<std::uint64_t> seed;
  /// MRs left out of the ranking (no pairs), with the reason.
  std::vector<std::string> warnings;
};

/// True when `sequence` is a permutation of `ids`.
bool is_permutation_of(const std::vector<MrId>& sequence, std::vector<MrId> ids);

/// Descending FDS; ties by ascending MR id.
Ordering rank_by_fds(const std::vector<diversity::FinalDiversityScore>& scores);

/// Per-pair score 1 - levenshtein(s, f) / max(|s|, |f|) over bytes, mean
/// per MR, ranked descending with ascending-id ties. `invert` ranks
/// ascending instead. MRs without pairs are excluded with a warning.
Ordering rank_by_distance(const std::map<MrId, std::vector<mr::TestPair>>& pairs_by_mr,
                          bool invert = false);

/// Per-pair distance-baseline score; two empty strings score 1.
double distance_pair_score(std::string_view source, std::string_view follow_up);

/// Greedy set cover over violating case columns. Ties go to the smallest
/// MR id, or to a seeded random pick when `tie_seed` is set. Once every
/// fault is covered the remaining MRs follow in ascending id order.
Ordering rank_fault_greedy(const OutcomeMatrix& matrix,
                           std::optional<std::uint64_t> tie_seed = std::nullopt);

/// Seeded Fisher-Yates shuffles of `mr_ids`.
std::vector<Ordering> random_orderings(const std::vector<MrId>& mr_ids, std::size_t count,
                                       std::uint64_t seed);

inline constexpr std::size_t kDefaultRandomOrderings = 1000;

}  // namespace fairprio::prioritizer
