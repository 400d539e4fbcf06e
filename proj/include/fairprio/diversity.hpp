// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairprio/analyzers.hpp"
#include "fairprio/corpus.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/mr_id.hpp"
#include "fairprio/providers.hpp"

namespace fairprio::diversity {

/// Per-pair metric values; every metric is oriented as diversity (higher
/// means more different). ss lies in [0, 2], the others in [0, 1].
struct PairDiversity {
  std::size_t pair_index = 0;
  double cs = 0.0;   // 1 - tf-idf cosine
  double ld = 0.0;   // unique tokens / total tokens
  double ner = 0.0;  // 1 - Jaccard of entity sets
  double se = 0.0;   // 1 - embedding cosine, clamped to [0, 1]
  double ss = 0.0;   // |sentiment difference|
  double tb = 0.0;   // total variation between tone distributions

  Eigen::Matrix<double, 6, 1> as_vector() const {
    return (Eigen::Matrix<double, 6, 1>() << cs, ld, ner, se, ss, tb).finished();
  }
};

struct DiversityBreakdown {
  MrId mr_id;
  std::size_t n_pairs = 0;
  double cs_mr = 0.0;
  double ld_mr = 0.0;
  double ner_mr = 0.0;
  double se_mr = 0.0;
  double ss_mr = 0.0;
  double tb_mr = 0.0;
  /// Means that left their expected range ([0,1], or [0,2] for ss).
  std::vector<std::string> warnings;
};

struct FinalDiversityScore {
  MrId mr_id;
  double fds = 0.0;
};

struct MrScore {
  DiversityBreakdown breakdown;
  FinalDiversityScore fds;
  std::vector<PairDiversity> per_pair;
};

/// Providers and tables the metrics run on. `tfidf` must be fitted on the
/// union of the run's source and follow-up texts (see fit_tfidf_for_run).
struct AnalyzerBundle {
  const corpus::SensitiveAttributeTable* table = nullptr;
  std::shared_ptr<const analyzers::TfIdfModel> tfidf;
  std::shared_ptr<const analyzers::EmbeddingProvider> embedder;
  std::shared_ptr<const analyzers::SentimentProvider> sentiment;
  std::shared_ptr<const analyzers::ToneProvider> tone;

  /// Builtin providers over `table`; tfidf left unset.
  static AnalyzerBundle builtin(const corpus::SensitiveAttributeTable& table);
};

/// Fits TF-IDF on every source and follow-up text of the given pair lists.
analyzers::TfIdfModel fit_tfidf_for_run(const std::vector<std::vector<mr::TestPair>>& pair_lists);

/// 1 - cos, with the zero-vector convention: one zero operand -> 1, both -> 0.
double cosine_distance(const analyzers::SparseVector& a, const analyzers::SparseVector& b);
double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

double cosine_diversity(const mr::TestPair& pair, const analyzers::TfIdfModel& model);
double lexical_diversity(const mr::TestPair& pair);
double ner_diversity(const mr::TestPair& pair, const corpus::SensitiveAttributeTable& table);
double semantic_diversity(const mr::TestPair& pair, const analyzers::EmbeddingProvider& provider);
double sentiment_diversity(const mr::TestPair& pair, const analyzers::SentimentProvider& provider);
double tone_diversity(const mr::TestPair& pair, const analyzers::ToneProvider& provider);

// Score-level forms of the last three, for callers that already hold the
// provider outputs.
double semantic_diversity(const analyzers::EmbeddingVector& a, const analyzers::EmbeddingVector& b);
double sentiment_diversity(const analyzers::SentimentScore& a, const analyzers::SentimentScore& b);
double tone_diversity(const analyzers::ToneDistribution& a, const analyzers::ToneDistribution& b);

PairDiversity score_pair(const mr::TestPair& pair, const AnalyzerBundle& bundle,
                         std::size_t pair_index = 0);

/// Means of per-pair values and their sum. Throws ValidationError when
/// `per_pair` is empty.
MrScore aggregate(MrId mr_id, std::vector<PairDiversity> per_pair);

/// Scores every pair of one MR and aggregates. Throws ValidationError for
/// an empty pair list or a bundle without tfidf/providers.
MrScore score_mr(MrId mr_id, const std::vector<mr::TestPair>& pairs, const AnalyzerBundle& bundle);

/// CSV with header mr_id,n_pairs,cs,ld,ner,se,ss,tb,fds.
std::string scores_csv(const std::vector<MrScore>& scores);

}  // namespace fairprio::diversity
