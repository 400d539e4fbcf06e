// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fairprio/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "fairprio/error.hpp"

namespace fairprio::diversity {

AnalyzerBundle AnalyzerBundle::builtin(const corpus::SensitiveAttributeTable& table) {
  AnalyzerBundle b;
  b.table = &table;
  b.embedder = std::make_shared<analyzers::HashingEmbedder>();
  b.sentiment = std::make_shared<analyzers::LexiconSentiment>();
  b.tone = std::make_shared<analyzers::KeywordTone>();
  return b;
}

analyzers::TfIdfModel fit_tfidf_for_run(const std::vector<std::vector<mr::TestPair>>& pair_lists) {
  std::vector<analyzers::TokenList> docs;
  for (const auto& pairs : pair_lists) {
    for (const auto& p : pairs) {
      docs.push_back(analyzers::tokenize(p.source.text));
      docs.push_back(analyzers::tokenize(p.follow_up_text));
    }
  }
  return analyzers::TfIdfModel::fit(docs);
}

double cosine_distance(const analyzers::SparseVector& a, const analyzers::SparseVector& b) {
  const bool za = a.nonZeros() == 0 || a.norm() == 0.0;
  const bool zb = b.nonZeros() == 0 || b.norm() == 0.0;
  if (za && zb) return 0.0;
  if (za || zb) return 1.0;
  return 1.0 - *analyzers::cosine(a, b);
}

double cosine_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const auto c = analyzers::cosine(a, b);
  if (!c) return (a.norm() == 0.0 && b.norm() == 0.0) ? 0.0 : 1.0;
  return 1.0 - *c;
}

double cosine_diversity(const mr::TestPair& pair, const analyzers::TfIdfModel& model) {
  const auto a = model.vectorize(analyzers::tokenize(pair.source.text));
  const auto b = model.vectorize(analyzers::tokenize(pair.follow_up_text));
  // tf-idf weights are non-negative, so the cosine is in [0, 1]; the clamp
  // only absorbs rounding.
  return std::clamp(cosine_distance(a, b), 0.0, 1.0);
}

double lexical_diversity(const mr::TestPair& pair) {
  const auto a = analyzers::tokenize(pair.source.text);
  const auto b = analyzers::tokenize(pair.follow_up_text);
  const std::size_t total = a.size() + b.size();
  if (total == 0) return 0.0;
  std::set<std::string> unique(a.begin(), a.end());
  unique.insert(b.begin(), b.end());
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double ner_diversity(const mr::TestPair& pair, const corpus::SensitiveAttributeTable& table) {
  const auto es = analyzers::extract_entities(pair.source.text, table);
  const auto ef = analyzers::extract_entities(pair.follow_up_text, table);
  std::size_t inter = 0;
  for (const auto& e : es) inter += ef.count(e);
  const std::size_t uni = es.size() + ef.size() - inter;
  if (uni == 0) return 0.0;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

double semantic_diversity(const analyzers::EmbeddingVector& a, const analyzers::EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    throw ValidationError("embedding dimensions differ: " + std::to_string(a.values.size()) +
                          " vs " + std::to_string(b.values.size()));
  }
  return std::clamp(cosine_distance(a.values, b.values), 0.0, 1.0);
}

double semantic_diversity(const mr::TestPair& pair, const analyzers::EmbeddingProvider& provider) {
  return semantic_diversity(provider.embed(pair.source.text), provider.embed(pair.follow_up_text));
}

double sentiment_diversity(const analyzers::SentimentScore& a, const analyzers::SentimentScore& b) {
  return std::abs(a.score - b.score);
}

double sentiment_diversity(const mr::TestPair& pair, const analyzers::SentimentProvider& provider) {
  return sentiment_diversity(provider.sentiment(pair.source.text),
                             provider.sentiment(pair.follow_up_text));
}

double tone_diversity(const analyzers::ToneDistribution& a, const analyzers::ToneDistribution& b) {
  return std::min(1.0, 0.5 * (a.probs - b.probs).cwiseAbs().sum());
}

double tone_diversity(const mr::TestPair& pair, const analyzers::ToneProvider& provider) {
  return tone_diversity(provider.tone(pair.source.text), provider.tone(pair.follow_up_text));
}

PairDiversity score_pair(const mr::TestPair& pair, const AnalyzerBundle& bundle,
                         std::size_t pair_index) {
  if (!bundle.table || !bundle.tfidf || !bundle.embedder || !bundle.sentiment || !bundle.tone) {
    throw ValidationError("analyzer bundle is incomplete");
  }
  PairDiversity d;
  d.pair_index = pair_index;
  d.cs = cosine_diversity(pair, *bundle.tfidf);
  d.ld = lexical_diversity(pair);
  d.ner = ner_diversity(pair, *bundle.table);
  d.se = semantic_diversity(pair, *bundle.embedder);
  d.ss = sentiment_diversity(pair, *bundle.sentiment);
  d.tb = tone_diversity(pair, *bundle.tone);
  return d;
}

MrScore aggregate(MrId mr_id, std::vector<PairDiversity> per_pair) {
  if (per_pair.empty()) {
    throw ValidationError(mr_id.str() + " has no test pairs; it is excluded from ranking");
  }
  Eigen::Matrix<double, 6, 1> sum = Eigen::Matrix<double, 6, 1>::Zero();
  for (const auto& p : per_pair) sum += p.as_vector();
  const Eigen::Matrix<double, 6, 1> mean = sum / static_cast<double>(per_pair.size());

  MrScore s;
  s.breakdown = {mr_id, per_pair.size(), mean[0], mean[1], mean[2], mean[3], mean[4], mean[5], {}};
  static constexpr const char* names[] = {"cs", "ld", "ner", "se", "ss", "tb"};
  for (int i = 0; i < 6; ++i) {
    const double hi = (i == 4) ? 2.0 : 1.0;
    if (!std::isfinite(mean[i]) || mean[i] < 0.0 || mean[i] > hi) {
      s.breakdown.warnings.push_back(std::string(names[i]) + " mean " + std::to_string(mean[i]) +
                                     " is outside [0, " + (i == 4 ? "2" : "1") + "]");
    }
  }
  s.fds = {mr_id, mean[0] + mean[1] + mean[2] + mean[3] + mean[4] + mean[5]};
  s.per_pair = std::move(per_pair);
  return s;
}

MrScore score_mr(MrId mr_id, const std::vector<mr::TestPair>& pairs, const AnalyzerBundle& bundle) {
  if (pairs.empty()) {
    throw ValidationError(mr_id.str() + " has no test pairs; it is excluded from ranking");
  }
  // Slots are indexed by pair position, so evaluation order never matters.
  std::vector<PairDiversity> per_pair(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) per_pair[i] = score_pair(pairs[i], bundle, i);
  return aggregate(mr_id, std::move(per_pair));
}

std::string scores_csv(const std::vector<MrScore>& scores) {
  std::string out = "mr_id,n_pairs,cs,ld,ner,se,ss,tb,fds\n";
  char buf[512];
  for (const auto& s : scores) {
    const auto& b = s.breakdown;
    std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  b.mr_id.str().c_str(), b.n_pairs, b.cs_mr, b.ld_mr, b.ner_mr, b.se_mr, b.ss_mr,
                  b.tb_mr, s.fds.fds);
    out += buf;
  }
  return out;
}

}  // namespace fairprio::diversity
