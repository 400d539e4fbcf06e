// Copyright 2026 The fairprio Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "fairprio/error.hpp"
#include "fairprio/prioritizer.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace fairprio;
using namespace fairprio::prioritizer;

namespace {

std::vector<MrId> ids(std::initializer_list<int> ns) {
  std::vector<MrId> out;
  for (int n : ns) out.emplace_back(n);
  return out;
}

// rows[i] lists the 1-based violating case numbers of MR(i+1); other cells pass.
OutcomeMatrix matrix(const std::vector<std::vector<int>>& rows, std::size_t n_cases) {
  std::vector<MrId> mrs;
  for (std::size_t i = 0; i < rows.size(); ++i) mrs.emplace_back(static_cast<int>(i) + 1);
  std::vector<std::string> cases;
  for (std::size_t j = 0; j < n_cases; ++j) cases.push_back("s" + std::to_string(j + 1));
  OutcomeMatrix m(mrs, cases);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n_cases; ++j) m.set(i, j, Cell::pass);
    for (int c : rows[i]) m.set(i, static_cast<std::size_t>(c - 1), Cell::violation);
  }
  return m;
}

}  // namespace

TEST(OutcomeMatrix, ShapeAndLookups) {
  OutcomeMatrix m(ids({3, 1}), {"a", "b", "c"});
  EXPECT_EQ(m.n_mrs(), 2u);
  EXPECT_EQ(m.n_cases(), 3u);
  EXPECT_EQ(m.at(1, 2), Cell::skipped);
  m.set(0, 1, Cell::violation);
  EXPECT_EQ(m.faults(0), std::vector<std::size_t>{1});
  EXPECT_EQ(m.row_of(MrId(1)), 1u);
  EXPECT_EQ(m.col_of("c"), 2u);
  EXPECT_THROW(m.at(2, 0), ValidationError);
  EXPECT_THROW(m.row_of(MrId(2)), ValidationError);
  EXPECT_THROW(OutcomeMatrix(ids({1, 1}), {"a"}), ValidationError);
  EXPECT_THROW(OutcomeMatrix(ids({1}), {"a", "a"}), ValidationError);
}

TEST(Strategy, NamesRoundTrip) {
  for (auto s : {Strategy::diversity, Strategy::distance, Strategy::fault, Strategy::random}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("fastest"), ValidationError);
}

TEST(RankByFds, DescendingWithIdTieBreak) {
  const auto o = rank_by_fds({{MrId(1), 2.0}, {MrId(2), 3.1}, {MrId(3), 3.1}});
  EXPECT_EQ(o.sequence, ids({2, 3, 1}));
  EXPECT_EQ(o.strategy, Strategy::diversity);
  EXPECT_EQ(o.scores.at(MrId(2)), 3.1);
  EXPECT_EQ(rank_by_fds({{MrId(7), 0.5}}).sequence, ids({7}));
  EXPECT_EQ(rank_by_fds({{MrId(3), 1.0}, {MrId(1), 1.0}, {MrId(2), 1.0}}).sequence, ids({1, 2, 3}));
  EXPECT_THROW(rank_by_fds({}), ValidationError);
  EXPECT_THROW(rank_by_fds({{MrId(1), 1.0}, {MrId(1), 2.0}}), ValidationError);
}

TEST(RankByFds, InvariantUnderPositiveRescaling) {
  text::SeededRng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<diversity::FinalDiversityScore> s;
    const std::size_t n = 1 + rng.index(11);
    for (std::size_t i = 0; i < n; ++i) {
      s.push_back({MrId(static_cast<int>(i) + 1), static_cast<double>(rng.index(5))});
    }
    auto scaled = s;
    for (auto& x : scaled) x.fds *= 3.75;
    EXPECT_EQ(rank_by_fds(s).sequence, rank_by_fds(scaled).sequence);
  }
}

TEST(DistancePairScore, Bounds) {
  EXPECT_EQ(distance_pair_score("abc", "abc"), 1.0);
  EXPECT_EQ(distance_pair_score("hello", ""), 0.0);
  EXPECT_EQ(distance_pair_score("", ""), 1.0);
  EXPECT_DOUBLE_EQ(distance_pair_score("kitten", "sitting"), 1.0 - 3.0 / 7.0);
}

TEST(RankByDistance, MatchesHandComputedMeans) {
  // MR1: kitten/sitting -> 4/7. MR2: abc/abd -> 2/3 and abc/xyz -> 0, mean 1/3.
  std::map<MrId, std::vector<mr::TestPair>> by_mr;
  by_mr[MrId(2)] = {fx::pair_of("abc", "abd", 2), fx::pair_of("abc", "xyz", 2)};
  by_mr[MrId(1)] = {fx::pair_of("kitten", "sitting", 1)};
  by_mr[MrId(3)] = {};
  const auto o = rank_by_distance(by_mr);
  EXPECT_EQ(o.sequence, ids({1, 2}));
  EXPECT_NEAR(o.scores.at(MrId(1)), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(o.scores.at(MrId(2)), 1.0 / 3.0, 1e-15);
  ASSERT_EQ(o.warnings.size(), 1u);
  EXPECT_NE(o.warnings[0].find("MR3"), std::string::npos);
  EXPECT_EQ(rank_by_distance(by_mr, true).sequence, ids({2, 1}));
}

TEST(RankByDistance, IdenticalPairsScoreOne) {
  std::map<MrId, std::vector<mr::TestPair>> by_mr;
  by_mr[MrId(1)] = {fx::pair_of("same", "same", 1)};
  EXPECT_EQ(rank_by_distance(by_mr).scores.at(MrId(1)), 1.0);
  EXPECT_THROW(rank_by_distance({{MrId(1), {}}}), ValidationError);
}

TEST(RankFaultGreedy, SetCoverExample) {
  const auto m = matrix({{1, 2}, {2, 3, 4}, {1}}, 4);
  const auto o = rank_fault_greedy(m);
  EXPECT_EQ(o.sequence, ids({2, 1, 3}));
  EXPECT_EQ(o.strategy, Strategy::fault);
  EXPECT_EQ(o.scores.at(MrId(2)), 3.0);
  EXPECT_EQ(o.scores.at(MrId(1)), 1.0);
  EXPECT_EQ(o.scores.at(MrId(3)), 0.0);
}

TEST(RankFaultGreedy, FallbacksAndDominance) {
  EXPECT_EQ(rank_fault_greedy(matrix({{}, {}, {}}, 3)).sequence, ids({1, 2, 3}));
  EXPECT_EQ(rank_fault_greedy(matrix({{1}, {2}, {1, 2, 3}}, 3)).sequence.front(), MrId(3));
  EXPECT_THROW(rank_fault_greedy(OutcomeMatrix{}), ValidationError);
}

TEST(RankFaultGreedy, SeededTieBreakIsReproducible) {
  const auto m = matrix({{1}, {2}, {3}, {4}}, 4);
  EXPECT_EQ(rank_fault_greedy(m).sequence, ids({1, 2, 3, 4}));
  const auto a = rank_fault_greedy(m, 9);
  EXPECT_EQ(a.sequence, rank_fault_greedy(m, 9).sequence);
  EXPECT_TRUE(is_permutation_of(a.sequence, m.mr_ids()));
  std::set<std::vector<MrId>> seen;
  for (std::uint64_t s = 0; s < 30; ++s) seen.insert(rank_fault_greedy(m, s).sequence);
  EXPECT_GT(seen.size(), 1u);
}

TEST(RankFaultGreedy, GreedyIsNotAlwaysAnOptimalCover) {
  // {1,2,3,4} is taken first, yet {1,2,5} and {3,4,6} alone cover all six.
  const auto m = matrix({{1, 2, 3, 4}, {1, 2, 5}, {3, 4, 6}}, 6);
  const auto o = rank_fault_greedy(m);
  EXPECT_EQ(o.sequence.front(), MrId(1));
  EXPECT_EQ(oracle::coverage(m, o.sequence, 2), 5u);
  EXPECT_EQ(oracle::coverage(m, ids({2, 3}), 2), 6u);
  EXPECT_EQ(oracle::greedy_choice_violation(m, o.sequence), 0u);
}

TEST(RandomOrderings, ReproduciblePermutations) {
  const auto mrs = ids({1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  const auto a = random_orderings(mrs, kDefaultRandomOrderings, 13);
  ASSERT_EQ(a.size(), 1000u);
  std::set<std::vector<MrId>> distinct;
  for (const auto& o : a) {
    EXPECT_EQ(o.sequence.size(), 11u);
    EXPECT_TRUE(is_permutation_of(o.sequence, mrs));
    EXPECT_EQ(o.strategy, Strategy::random);
    distinct.insert(o.sequence);
  }
  EXPECT_GT(distinct.size(), 990u);
  const auto b = random_orderings(mrs, 1000, 13);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].sequence, b[i].sequence);
  EXPECT_EQ(random_orderings(ids({4}), 1, 0).front().sequence, ids({4}));
  EXPECT_THROW(random_orderings(mrs, 0, 1), ValidationError);
}

TEST(RandomOrderings, FirstPositionIsRoughlyUniform) {
  const auto mrs = ids({1, 2, 3, 4});
  std::map<MrId, int> first;
  for (const auto& o : random_orderings(mrs, 4000, 21)) ++first[o.sequence.front()];
  for (const auto& [id, n] : first) EXPECT_NEAR(n, 1000, 150) << id.str();
}

TEST(IsPermutationOf, Structural) {
  EXPECT_TRUE(is_permutation_of(ids({2, 1}), ids({1, 2})));
  EXPECT_FALSE(is_permutation_of(ids({1, 1}), ids({1, 2})));
  EXPECT_FALSE(is_permutation_of(ids({1}), ids({1, 2})));
  EXPECT_FALSE(is_permutation_of(ids({1, 3}), ids({1, 2})));
}
