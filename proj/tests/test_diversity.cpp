// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fairprio/diversity.hpp"
#include "fairprio/error.hpp"
#include "fairprio/providers.hpp"
#include "support.hpp"

using namespace fairprio;
using namespace fairprio::diversity;
using analyzers::ToneDistribution;
using analyzers::ToneVector;

namespace {

const corpus::SensitiveAttributeTable& table() { return corpus::SensitiveAttributeTable::builtin(); }

const mr::TestPair& worked_pair() {
  static const mr::TestPair p = fx::pair_of("The teacher explained the concept clearly.",
                                            "The engineer explained the idea effectively.", 4);
  return p;
}

PairDiversity values(double cs, double ld, double ner, double se, double ss, double tb,
                     std::size_t index = 0) {
  PairDiversity d;
  d.pair_index = index;
  d.cs = cs;
  d.ld = ld;
  d.ner = ner;
  d.se = se;
  d.ss = ss;
  d.tb = tb;
  return d;
}

ToneDistribution one_hot(std::size_t i) {
  ToneDistribution d;
  d.probs = ToneVector::Zero();
  d.probs[static_cast<Eigen::Index>(i)] = 1.0;
  return d;
}

}  // namespace

TEST(Cosine, IdenticalAndDisjointTexts) {
  const auto same = fx::pair_of("alpha beta gamma", "alpha beta gamma");
  const auto apart = fx::pair_of("alpha beta", "gamma delta");
  const auto model = fit_tfidf_for_run({{same, apart}});
  EXPECT_NEAR(cosine_diversity(same, model), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(cosine_diversity(apart, model), 1.0);
}

TEST(Cosine, WorkedPairMatchesHandTfIdf) {
  // Two documents; "the" (twice per doc) and "explained" occur in both, so
  // their idf is 1. The other words have idf a = ln(3/2) + 1.
  // dot = 2*2 + 1*1 = 5, |v|^2 = 4 + 1 + 3a^2 for either document.
  const double a = std::log(1.5) + 1.0;
  const double expected = 1.0 - 5.0 / (5.0 + 3.0 * a * a);
  const auto model = fit_tfidf_for_run({{worked_pair()}});
  EXPECT_NEAR(cosine_diversity(worked_pair(), model), expected, 1e-12);
  EXPECT_NEAR(expected, 0.5423, 1e-4);
}

TEST(Cosine, ZeroVectorConventions) {
  const analyzers::SparseVector zero(4);
  analyzers::SparseVector x(4);
  x.insert(1) = 1.0;
  EXPECT_EQ(cosine_distance(zero, zero), 0.0);
  EXPECT_EQ(cosine_distance(zero, x), 1.0);
  EXPECT_EQ(cosine_distance(x, zero), 1.0);
}

TEST(Lexical, UniqueOverTotal) {
  EXPECT_NEAR(lexical_diversity(worked_pair()), 8.0 / 12.0, 1e-15);
  EXPECT_DOUBLE_EQ(lexical_diversity(fx::pair_of("a b c", "a b c")), 0.5);
  EXPECT_DOUBLE_EQ(lexical_diversity(fx::pair_of("a b c", "d e f")), 1.0);
  EXPECT_EQ(lexical_diversity(fx::pair_of("", "")), 0.0);
}

TEST(Ner, JaccardOverEntitySets) {
  EXPECT_DOUBLE_EQ(ner_diversity(worked_pair(), table()), 1.0);
  EXPECT_EQ(ner_diversity(fx::pair_of("a male nurse", "the male nurse"), table()), 0.0);
  EXPECT_EQ(ner_diversity(fx::pair_of("hello", "there"), table()), 0.0);
  // {male, young} vs {male}: 1 - 1/2.
  EXPECT_DOUBLE_EQ(ner_diversity(fx::pair_of("a young male nurse", "a male nurse"), table()), 0.5);
}

TEST(Semantic, IdenticalTextsAndClamp) {
  const analyzers::HashingEmbedder e;
  EXPECT_NEAR(semantic_diversity(fx::pair_of("same words here", "same words here"), e), 0.0, 1e-12);
  analyzers::EmbeddingVector a{Eigen::Vector2d(1.0, 0.0), "t"};
  analyzers::EmbeddingVector b{Eigen::Vector2d(-0.1, std::sqrt(1.0 - 0.01)), "t"};
  EXPECT_DOUBLE_EQ(semantic_diversity(a, b), 1.0);
  analyzers::EmbeddingVector c{Eigen::Vector3d(1.0, 0.0, 0.0), "t"};
  EXPECT_THROW(semantic_diversity(a, c), ValidationError);
}

TEST(Semantic, WorkedPairUnderBuiltinEmbedder) {
  // Frozen fixture. It equals 1 - 5/8: signed counts with "the" twice give
  // |v|^2 = 8 per side and a shared mass of 4 + 1, with no bucket collisions.
  const analyzers::HashingEmbedder e;
  EXPECT_DOUBLE_EQ(semantic_diversity(worked_pair(), e), 0.375);
}

TEST(Sentiment, AbsoluteDifference) {
  using analyzers::SentimentScore;
  EXPECT_NEAR(sentiment_diversity(SentimentScore::from_score(0.8), SentimentScore::from_score(0.75)),
              0.05, 1e-12);
  EXPECT_EQ(sentiment_diversity(SentimentScore::from_score(0.3), SentimentScore::from_score(0.3)), 0.0);
  EXPECT_EQ(sentiment_diversity(SentimentScore::from_score(1.0), SentimentScore::from_score(-1.0)), 2.0);
}

TEST(Tone, TotalVariation) {
  const ToneDistribution uniform;
  EXPECT_EQ(tone_diversity(uniform, uniform), 0.0);
  EXPECT_DOUBLE_EQ(tone_diversity(one_hot(0), one_hot(1)), 1.0);
  // Half of (6/7 + 6 * 1/7).
  EXPECT_NEAR(tone_diversity(uniform, one_hot(3)), 6.0 / 7.0, 1e-12);
}

TEST(ScoreMr, WorkedExampleAggregation) {
  const auto s = aggregate(MrId(1), {values(0.45, 0.75, 0.5, 0.92, 0.05, 0.0)});
  EXPECT_NEAR(s.fds.fds, 2.67, 1e-12);
  EXPECT_EQ(s.breakdown.n_pairs, 1u);
  EXPECT_DOUBLE_EQ(s.breakdown.ld_mr, 0.75);
}

TEST(ScoreMr, AllZeroAndTwoPairMeans) {
  EXPECT_EQ(aggregate(MrId(1), {values(0, 0, 0, 0, 0, 0)}).fds.fds, 0.0);
  const auto s = aggregate(MrId(2), {values(0.2, 0.4, 0.6, 0.8, 1.0, 0.1, 0),
                                     values(0.4, 0.2, 0.0, 0.6, 0.5, 0.3, 1)});
  EXPECT_DOUBLE_EQ(s.breakdown.cs_mr, 0.3);
  EXPECT_DOUBLE_EQ(s.breakdown.ld_mr, 0.3);
  EXPECT_DOUBLE_EQ(s.breakdown.ner_mr, 0.3);
  EXPECT_DOUBLE_EQ(s.breakdown.se_mr, 0.7);
  EXPECT_DOUBLE_EQ(s.breakdown.ss_mr, 0.75);
  EXPECT_DOUBLE_EQ(s.breakdown.tb_mr, 0.2);
  EXPECT_TRUE(s.breakdown.warnings.empty());
}

TEST(ScoreMr, EmptyPairListIsRejected) {
  EXPECT_THROW(aggregate(MrId(1), {}), ValidationError);
  auto bundle = AnalyzerBundle::builtin(table());
  EXPECT_THROW(score_mr(MrId(1), {}, bundle), ValidationError);
}

TEST(ScoreMr, OutOfRangeMeanIsFlagged) {
  const auto s = aggregate(MrId(1), {values(1.5, 0, 0, 0, 1.5, 0)});
  ASSERT_EQ(s.breakdown.warnings.size(), 1u);
  EXPECT_NE(s.breakdown.warnings[0].find("cs"), std::string::npos);
}

TEST(ScoreMr, BuiltinBundleOnFixturePairs) {
  const auto cases = corpus::load_corpus(fx::source_path("data/fixtures/corpus.jsonl"), table());
  const auto pairs = mr::derive_pairs(mr::definition(MrId(4)), cases, table(), 11).pairs;
  auto bundle = AnalyzerBundle::builtin(table());
  bundle.tfidf = std::make_shared<analyzers::TfIdfModel>(fit_tfidf_for_run({pairs}));
  const auto s = score_mr(MrId(4), pairs, bundle);
  ASSERT_EQ(s.per_pair.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(s.per_pair[i].pair_index, i);
  EXPECT_GT(s.fds.fds, 0.0);
  EXPECT_LE(s.fds.fds, 7.0);
  // MR4 changes exactly one entity per case: {a, b} -> {a', b} is 1 - 1/3.
  EXPECT_NEAR(s.breakdown.ner_mr, 2.0 / 3.0, 1e-12);

  const auto csv = scores_csv({s});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mr_id,n_pairs,cs,ld,ner,se,ss,tb,fds");
}

TEST(ScoreMr, MissingTfIdfModelIsAnError) {
  const auto bundle = AnalyzerBundle::builtin(table());
  EXPECT_THROW(score_mr(MrId(1), {worked_pair()}, bundle), ValidationError);
}
