// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairprio/mr_id.hpp"
#include "fairprio/outcome_matrix.hpp"
#include "fairprio/prioritizer.hpp"

namespace fairprio::evaluation {

struct MrFdr {
  double fdr = 0.0;
  std::size_t violations = 0;
  std::size_t applicable = 0;  // pass + violation cells
};

/// violations / applicable per MR; 0 when nothing was applicable.
std::map<MrId, MrFdr> fdr_per_mr(const prioritizer::OutcomeMatrix& matrix);

struct CurvePoint {
  std::size_t k = 0;
  MrId mr_id;  // k-th MR of the ordering; unset (MR0) for averaged curves
  double value = 0.0;
};

/// At k: distinct cases violated by any of the first k MRs, over the number
/// of cases in the matrix. Throws ValidationError unless `sequence` is a
/// permutation of the matrix MRs.
std::vector<CurvePoint> cumulative_fdr(const prioritizer::OutcomeMatrix& matrix,
                                       const std::vector<MrId>& sequence);

/// 1-based count of evaluated pairs up to and including the first
/// violation, walking MRs in order and cases in corpus order. Skipped and
/// errored cells are not counted. nullopt when nothing violates.
std::optional<std::size_t> ttff(const prioritizer::OutcomeMatrix& matrix,
                                 const std::vector<MrId>& sequence);

struct StrategyResult {
  std::string strategy;
  std::size_t n_orderings = 1;
  std::vector<CurvePoint> curve;  // pointwise mean for random
  std::optional<double> ttff;     // mean for random
  std::optional<double> prioritization_seconds;
};

struct EvalReport {
  std::map<MrId, MrFdr> per_mr_fdr;
  std::size_t n_cases = 0;
  std::vector<StrategyResult> strategies;
  nlohmann::json metadata = nlohmann::json::object();

  nlohmann::ordered_json to_json() const;
  /// strategy,k,mr_id,cumulative_fdr
  std::string curves_csv() const;
  /// strategy,ttff,prioritization_seconds
  std::string summary_csv() const;
};

/// One result per entry of `orderings` (in the given order), then one for
/// `random_set` when it is non-empty. Throws ValidationError when any
/// ordering is not over the matrix MR set.
EvalReport compare_strategies(const prioritizer::OutcomeMatrix& matrix,
                              const std::vector<prioritizer::Ordering>& orderings,
                              const std::vector<prioritizer::Ordering>& random_set,
                              const std::map<std::string, double>& timings = {});

}  // namespace fairprio::evaluation
