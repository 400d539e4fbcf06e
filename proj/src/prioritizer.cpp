// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/prioritizer.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "fairprio/analyzers.hpp"
#include "fairprio/error.hpp"
#include "fairprio/text.hpp"

namespace fairprio::prioritizer {

// ---- OutcomeMatrix ---------------------------------------------------------

OutcomeMatrix::OutcomeMatrix(std::vector<MrId> mr_ids, std::vector<std::string> case_ids)
    : mr_ids_(std::move(mr_ids)), case_ids_(std::move(case_ids)) {
  if (std::set<MrId>(mr_ids_.begin(), mr_ids_.end()).size() != mr_ids_.size()) {
    throw ValidationError("outcome matrix has duplicate MR ids");
  }
  if (std::set<std::string>(case_ids_.begin(), case_ids_.end()).size() != case_ids_.size()) {
    throw ValidationError("outcome matrix has duplicate case ids");
  }
  cells_ = Grid::Constant(static_cast<Eigen::Index>(mr_ids_.size()),
                          static_cast<Eigen::Index>(case_ids_.size()),
                          static_cast<std::uint8_t>(Cell::skipped));
}

Cell OutcomeMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= n_mrs() || c >= n_cases()) throw ValidationError("outcome matrix index out of range");
  return static_cast<Cell>(cells_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
}

void OutcomeMatrix::set(std::size_t r, std::size_t c, Cell x) {
  if (r >= n_mrs() || c >= n_cases()) throw ValidationError("outcome matrix index out of range");
  cells_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<std::uint8_t>(x);
}

std::size_t OutcomeMatrix::row_of(MrId id) const {
  const auto it = std::find(mr_ids_.begin(), mr_ids_.end(), id);
  if (it == mr_ids_.end()) throw ValidationError(id.str() + " is not in the outcome matrix");
  return static_cast<std::size_t>(it - mr_ids_.begin());
}

std::size_t OutcomeMatrix::col_of(const std::string& case_id) const {
  const auto it = std::find(case_ids_.begin(), case_ids_.end(), case_id);
  if (it == case_ids_.end()) throw ValidationError("case " + case_id + " is not in the outcome matrix");
  return static_cast<std::size_t>(it - case_ids_.begin());
}

std::vector<std::size_t> OutcomeMatrix::faults(std::size_t r) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < n_cases(); ++c) {
    if (violation(r, c)) out.push_back(c);
  }
  return out;
}

// ---- strategies ------------------------------------------------------------

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::diversity: return "diversity";
    case Strategy::distance: return "distance";
    case Strategy::fault: return "fault";
    case Strategy::random: return "random";
  }
  return "?";
}

Strategy parse_strategy(std::string_view s) {
  if (s == "diversity") return Strategy::diversity;
  if (s == "distance") return Strategy::distance;
  if (s == "fault") return Strategy::fault;
  if (s == "random") return Strategy::random;
  throw ValidationError("unknown strategy '" + std::string(s) +
                        "' (expected diversity, distance, fault or random)");
}

bool is_permutation_of(const std::vector<MrId>& sequence, std::vector<MrId> ids) {
  std::vector<MrId> seq = sequence;
  std::sort(seq.begin(), seq.end());
  std::sort(ids.begin(), ids.end());
  return seq == ids && std::adjacent_find(seq.begin(), seq.end()) == seq.end();
}

namespace {

Ordering rank_scores(Strategy strategy, std::map<MrId, double> scores, bool descending) {
  Ordering o;
  o.strategy = strategy;
  for (const auto& [id, _] : scores) o.sequence.push_back(id);
  // Map iteration is already ascending by id; stable_sort keeps that as the
  // tie-break.
  std::stable_sort(o.sequence.begin(), o.sequence.end(), [&](MrId a, MrId b) {
    return descending ? scores.at(a) > scores.at(b) : scores.at(a) < scores.at(b);
  });
  o.scores = std::move(scores);
  return o;
}

}  // namespace

Ordering rank_by_fds(const std::vector<diversity::FinalDiversityScore>& scores) {
  if (scores.empty()) throw ValidationError("cannot rank zero MRs");
  std::map<MrId, double> m;
  for (const auto& s : scores) {
    if (!m.emplace(s.mr_id, s.fds).second) {
      throw ValidationError("duplicate score for " + s.mr_id.str());
    }
  }
  return rank_scores(Strategy::diversity, std::move(m), true);
}

double distance_pair_score(std::string_view source, std::string_view follow_up) {
  const std::size_t longest = std::max(source.size(), follow_up.size());
  if (longest == 0) return 1.0;
  const double d = static_cast<double>(analyzers::levenshtein(source, follow_up));
  return 1.0 - d / static_cast<double>(longest);
}

Ordering rank_by_distance(const std::map<MrId, std::vector<mr::TestPair>>& pairs_by_mr, bool invert) {
  std::map<MrId, double> scores;
  std::vector<std::string> warnings;
  for (const auto& [id, pairs] : pairs_by_mr) {
    if (pairs.empty()) {
      warnings.push_back(id.str() + " has no test pairs and was excluded");
      continue;
    }
    double sum = 0.0;
    for (const auto& p : pairs) sum += distance_pair_score(p.source.text, p.follow_up_text);
    scores[id] = sum / static_cast<double>(pairs.size());
  }
  if (scores.empty()) throw ValidationError("no MR has test pairs to rank");
  Ordering o = rank_scores(Strategy::distance, std::move(scores), !invert);
  o.warnings = std::move(warnings);
  return o;
}

Ordering rank_fault_greedy(const OutcomeMatrix& matrix, std::optional<std::uint64_t> tie_seed) {
  if (matrix.n_mrs() == 0) throw ValidationError("cannot rank an empty outcome matrix");
  std::vector<std::size_t> rows(matrix.n_mrs());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::sort(rows.begin(), rows.end(),
            [&](std::size_t a, std::size_t b) { return matrix.mr_ids()[a] < matrix.mr_ids()[b]; });

  std::vector<bool> covered(matrix.n_cases(), false);
  std::vector<bool> used(matrix.n_mrs(), false);
  std::optional<text::SeededRng> rng;
  if (tie_seed) rng.emplace(*tie_seed);

  Ordering o;
  o.strategy = Strategy::fault;
  o.seed = tie_seed;
  while (true) {
    std::size_t best_gain = 0;
    std::vector<std::size_t> best;
    for (std::size_t r : rows) {
      if (used[r]) continue;
      std::size_t gain = 0;
      for (std::size_t c : matrix.faults(r)) gain += covered[c] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best.assign(1, r);
      } else if (gain == best_gain && gain > 0) {
        best.push_back(r);
      }
    }
    if (best_gain == 0) break;
    const std::size_t pick = rng ? best[rng->index(best.size())] : best.front();
    used[pick] = true;
    for (std::size_t c : matrix.faults(pick)) covered[c] = true;
    o.sequence.push_back(matrix.mr_ids()[pick]);
    o.scores[matrix.mr_ids()[pick]] = static_cast<double>(best_gain);
  }
  for (std::size_t r : rows) {
    if (!used[r]) {
      o.sequence.push_back(matrix.mr_ids()[r]);
      o.scores[matrix.mr_ids()[r]] = 0.0;
    }
  }
  return o;
}

std::vector<Ordering> random_orderings(const std::vector<MrId>& mr_ids, std::size_t count,
                                       std::uint64_t seed) {
  if (count == 0) throw ValidationError("random ordering count must be at least 1");
  if (mr_ids.empty()) throw ValidationError("cannot shuffle zero MRs");
  std::vector<MrId> base = mr_ids;
  std::sort(base.begin(), base.end());
  text::SeededRng rng(seed);
  std::vector<Ordering> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Ordering o;
    o.strategy = Strategy::random;
    o.seed = seed;
    o.sequence = base;
    for (std::size_t j = o.sequence.size(); j > 1; --j) {
      std::swap(o.sequence[j - 1], o.sequence[rng.index(j)]);
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace fairprio::prioritizer
