// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

// Seeded property checks across modules, each against an oracle that does
// not share code with the library.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "fairprio/analyzers.hpp"
#include "fairprio/diversity.hpp"
#include "fairprio/mr_engine.hpp"
#include "fairprio/providers.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fairprio;

namespace {

const corpus::SensitiveAttributeTable& table() { return corpus::SensitiveAttributeTable::builtin(); }

const std::vector<corpus::SourceTestCase>& fixture_cases() {
  static const auto cases = corpus::load_corpus(fx::source_path("data/fixtures/corpus.jsonl"), table());
  return cases;
}

std::vector<mr::TestPair> random_pairs(std::uint64_t seed, std::size_t n) {
  text::SeededRng rng(seed);
  std::vector<mr::TestPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto source = fx::random_text(rng);
    if (text::trim(source).empty()) source = "x";  // cases must carry text
    out.push_back(fx::pair_of(source, fx::random_text(rng), 1, "r" + std::to_string(i)));
  }
  return out;
}

diversity::AnalyzerBundle bundle_for(const std::vector<mr::TestPair>& pairs) {
  auto b = diversity::AnalyzerBundle::builtin(table());
  b.tfidf = std::make_shared<analyzers::TfIdfModel>(diversity::fit_tfidf_for_run({pairs}));
  return b;
}

}  // namespace

TEST(Levenshtein, MatchesOracleAndIsAMetric) {
  text::SeededRng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto a = fx::random_string(rng, 12);
    const auto b = fx::random_string(rng, 12);
    const auto c = fx::random_string(rng, 12);
    const auto ab = analyzers::levenshtein(a, b);
    ASSERT_EQ(ab, oracle::edit_distance(a, b)) << a << " / " << b;
    EXPECT_EQ(ab, analyzers::levenshtein(b, a));
    EXPECT_EQ(ab == 0, a == b);
    EXPECT_LE(analyzers::levenshtein(a, c), ab + analyzers::levenshtein(b, c));
    EXPECT_GE(ab, a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
  }
}

TEST(Metrics, StayInRangeOnRandomPairs) {
  const auto pairs = random_pairs(29, 2000);
  const auto s = diversity::score_mr(MrId(1), pairs, bundle_for(pairs));
  ASSERT_EQ(s.per_pair.size(), pairs.size());
  for (const auto& d : s.per_pair) {
    const auto v = d.as_vector();
    ASSERT_TRUE(v.allFinite()) << d.pair_index;
    for (double x : {d.cs, d.ld, d.ner, d.se, d.tb}) {
      EXPECT_GE(x, 0.0) << d.pair_index;
      EXPECT_LE(x, 1.0) << d.pair_index;
    }
    EXPECT_GE(d.ss, 0.0);
    EXPECT_LE(d.ss, 2.0);
  }
  EXPECT_GE(s.fds.fds, 0.0);
  EXPECT_LE(s.fds.fds, 7.0);
  EXPECT_TRUE(s.breakdown.warnings.empty());
}

TEST(Providers, OutputInvariantsOnRandomText) {
  text::SeededRng rng(31);
  std::vector<analyzers::TokenList> docs;
  for (int i = 0; i < 300; ++i) docs.push_back(analyzers::tokenize(fx::random_text(rng)));
  const auto model = analyzers::TfIdfModel::fit(docs);
  const analyzers::LexiconSentiment sentiment;
  const analyzers::KeywordTone tone;
  for (int i = 0; i < 1000; ++i) {
    const auto t = fx::random_text(rng);
    const double norm = model.vectorize(analyzers::tokenize(t)).norm();
    EXPECT_TRUE(norm == 0.0 || std::abs(norm - 1.0) <= 1e-9) << t;
    const auto d = tone.tone(t);
    EXPECT_NEAR(d.probs.sum(), 1.0, 1e-9);
    EXPECT_GE(d.probs.minCoeff(), 0.0);
    const auto sc = sentiment.sentiment(t);
    EXPECT_EQ(sc.label == analyzers::SentimentLabel::positive, sc.score >= 0.0) << t;
  }
}

TEST(SpanConservation, HoldsOnFixtureCorpusForEveryMr) {
  // Expected gazetteer matches after each relation, from k before it.
  const auto expected = [](int mr, std::size_t k) -> std::size_t {
    switch (mr) {
      case 1: return k - 1;
      case 2: return 0;
      case 6:
      case 11: return k + 1;
      default: return k;
    }
  };
  for (const std::uint64_t seed : {11u, 1u, 2u}) {
    for (const auto& def : mr::registry()) {
      const int n = def.id.number();
      for (const auto& c : fixture_cases()) {
        const auto before = oracle::attribute_values(c.text, table());
        ASSERT_EQ(before.size(), c.attributes.size()) << c.id;
        const auto out = mr::apply_mr(def, c, table(), seed);
        if (const auto* skip = std::get_if<mr::Inapplicable>(&out)) {
          EXPECT_EQ(skip->reason.find("conservation"), std::string::npos) << def.id.str() << " " << c.id;
          continue;
        }
        const auto& pair = std::get<mr::TestPair>(out);
        const auto after = oracle::attribute_values(pair.follow_up_text, table());
        EXPECT_EQ(after.size(), expected(n, before.size()))
            << def.id.str() << " " << c.id << ": " << pair.follow_up_text;
        if (n == 3 || n == 7 || n == 9) {
          auto x = before, y = after;
          std::sort(x.begin(), x.end());
          std::sort(y.begin(), y.end());
          EXPECT_EQ(x, y) << def.id.str() << " " << c.id << ": " << pair.follow_up_text;
        }
      }
    }
  }
}

TEST(Diversity, InvariantUnderPairOrder) {
  std::mt19937_64 rng(37);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    auto pairs = random_pairs(100 + trial, 2 + trial % 12);
    const auto bundle = bundle_for(pairs);
    const auto a = diversity::score_mr(MrId(1), pairs, bundle);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto b = diversity::score_mr(MrId(1), pairs, bundle);
    EXPECT_NEAR(a.fds.fds, b.fds.fds, 1e-12);
    EXPECT_NEAR(a.breakdown.cs_mr, b.breakdown.cs_mr, 1e-12);
    EXPECT_NEAR(a.breakdown.tb_mr, b.breakdown.tb_mr, 1e-12);
  }
}

TEST(Diversity, MeansGrowWhenAPairExceedsThem) {
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&] { return unit(gen); };
  for (std::size_t trial = 0; trial < 200; ++trial) {
    std::vector<diversity::PairDiversity> per;
    const std::size_t n = 1 + trial % 6;
    for (std::size_t i = 0; i < n; ++i) {
      diversity::PairDiversity d;
      d.pair_index = i;
      d.cs = uniform();
      d.ld = uniform();
      d.ner = uniform();
      d.se = uniform();
      d.ss = 2.0 * uniform();
      d.tb = uniform();
      per.push_back(d);
    }
    const auto before = diversity::aggregate(MrId(1), per).breakdown;
    diversity::PairDiversity top;
    top.pair_index = n;
    top.cs = before.cs_mr + 0.01;
    top.ld = before.ld_mr + 0.01;
    top.ner = before.ner_mr + 0.01;
    top.se = before.se_mr + 0.01;
    top.ss = before.ss_mr + 0.01;
    top.tb = before.tb_mr + 0.01;
    per.push_back(top);
    const auto after = diversity::aggregate(MrId(1), per).breakdown;
    EXPECT_GT(after.cs_mr, before.cs_mr);
    EXPECT_GT(after.ld_mr, before.ld_mr);
    EXPECT_GT(after.ner_mr, before.ner_mr);
    EXPECT_GT(after.se_mr, before.se_mr);
    EXPECT_GT(after.ss_mr, before.ss_mr);
    EXPECT_GT(after.tb_mr, before.tb_mr);
  }
}

TEST(Diversity, ScoreMatchesDirectSummation) {
  const analyzers::HashingEmbedder embedder;
  const analyzers::LexiconSentiment sentiment;
  const analyzers::KeywordTone tone;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    const auto pairs = random_pairs(500 + trial, 1 + trial % 5);
    const auto bundle = bundle_for(pairs);
    double total = 0.0;
    for (const auto& p : pairs) {
      total += diversity::cosine_diversity(p, *bundle.tfidf) + diversity::lexical_diversity(p) +
               diversity::ner_diversity(p, table()) + diversity::semantic_diversity(p, embedder) +
               diversity::sentiment_diversity(p, sentiment) + diversity::tone_diversity(p, tone);
    }
    const double direct = total / static_cast<double>(pairs.size());
    EXPECT_NEAR(diversity::score_mr(MrId(1), pairs, bundle).fds.fds, direct, 1e-12) << trial;
  }
}
