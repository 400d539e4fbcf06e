// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairprio/config.hpp"
#include "fairprio/corpus.hpp"
#include "fairprio/diversity.hpp"
#include "fairprio/evaluation.hpp"
#include "fairprio/executor.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/prioritizer.hpp"

// Pipeline steps behind the CLI subcommands. Artifacts live under the
// configured output directory:
//
//   pairs/MR<n>.jsonl, pairs/skips.json
//   orderings/<strategy>.json, orderings/<strategy>.timing.json,
//   orderings/diversity.scores.json
//   matrix.json, matrix.timing.json
//   report/report.json, report/curves.csv, report/summary.csv
namespace fairprio::cli {

/// Config plus everything loaded from it.
class Workspace {
 public:
  explicit Workspace(config::RunConfig cfg);

  const config::RunConfig& config() const noexcept { return cfg_; }
  const corpus::SensitiveAttributeTable& table() const noexcept { return table_; }
  const mr::MrTemplates& templates() const noexcept { return templates_; }
  const std::vector<corpus::SourceTestCase>& cases() const noexcept { return cases_; }
  const std::filesystem::path& out() const noexcept { return cfg_.output_dir; }

  /// Derives pairs for every selected MR.
  std::vector<mr::DerivedPairs> derive() const;
  /// Pairs of every selected MR, read from pairs/ when present, derived
  /// otherwise.
  std::map<MrId, std::vector<mr::TestPair>> pairs() const;

  /// Shared cassette, opened lazily in the configured mode.
  std::shared_ptr<executor::Cassette> cassette(
      std::optional<executor::CassetteMode> mode = std::nullopt) const;
  diversity::AnalyzerBundle analyzers() const;
  std::shared_ptr<const analyzers::SentimentProvider> sentiment() const;

 private:
  config::RunConfig cfg_;
  corpus::SensitiveAttributeTable table_;
  mr::MrTemplates templates_;
  std::vector<corpus::SourceTestCase> cases_;
  mutable std::shared_ptr<executor::Cassette> cassette_;
  mutable std::shared_ptr<executor::HttpTransport> transport_;
};

/// MRs with at least one pair: the set every ordering and the matrix cover.
std::vector<MrId> active_mrs(const std::map<MrId, std::vector<mr::TestPair>>& pairs);

/// Writes pairs/ and returns the derivation results.
std::vector<mr::DerivedPairs> cmd_pairs(const Workspace& ws);

/// Writes orderings/<strategy>.json plus its timing file. For random the
/// first ordering of the set is returned.
prioritizer::Ordering cmd_prioritize(const Workspace& ws, prioritizer::Strategy strategy);

/// Executes every pair and writes matrix.json.
executor::ExecutionReport cmd_run(const Workspace& ws,
                                  std::optional<executor::CassetteMode> mode = std::nullopt);

/// Joins matrix.json with the orderings present and writes report/.
evaluation::EvalReport cmd_evaluate(const Workspace& ws);

/// Human-readable summary of report/report.json.
std::string cmd_report(const Workspace& ws);

/// Entry point of the fairprio executable. Returns the process exit code:
/// 0 success, 1 validation, 2 execution, 3 replay miss.
int main(int argc, char** argv);

}  // namespace fairprio::cli
