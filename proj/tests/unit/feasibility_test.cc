// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "velocomp/czsl/feasibility.hpp"
#include "velocomp/czsl/metrics.hpp"
#include "velocomp/error.hpp"

namespace velocomp::czsl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// a1 and a0 are close, a2 leans on a0; o0 and o1 are close, o2 is apart.
// Seen: (0,0) (0,1) (1,1) (2,2). By hand the unseen scores are
//   (0,2) 0.30  (1,0) 0.70  (1,2) 0.24  (2,0) 0.30  (2,1) 0.30
struct Space {
  LabelSpace space{{"a0", "a1", "a2"},
                   {"o0", "o1", "o2"},
                   {{0, 0}, {0, 1}, {1, 1}, {2, 2}},
                   {{0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};
  nn::Tensor attrs{{3, 3}, {1, 0, 0, 0.8, 0.6, 0, 0.6, 0, 0.8}};
  nn::Tensor objs{{3, 3}, {1, 0, 0, 0.6, 0.8, 0, 0, 0, 1}};
};

std::size_t col(std::uint32_t a, std::uint32_t o) { return a * 3 + o; }

TEST(Feasibility, HandScores) {
  Space s;
  const auto score = feasibility_scores(s.space, s.attrs, s.objs);
  ASSERT_EQ(score.size(), 9u);
  EXPECT_NEAR(score[col(0, 2)], 0.30, 1e-12);
  EXPECT_NEAR(score[col(1, 0)], 0.70, 1e-12);
  EXPECT_NEAR(score[col(1, 2)], 0.24, 1e-12);
  EXPECT_NEAR(score[col(2, 0)], 0.30, 1e-12);
  EXPECT_NEAR(score[col(2, 1)], 0.30, 1e-12);
}

TEST(Feasibility, ImplausiblePairIsMaskedFirst) {
  Space s;
  const FeasibleSpace low = feasibility_filter(s.space, s.attrs, s.objs, 0.25);
  EXPECT_EQ(low.masked_count(), 1u);
  EXPECT_TRUE(low.masked[col(1, 2)]);
  const FeasibleSpace mid = feasibility_filter(s.space, s.attrs, s.objs, 0.5);
  EXPECT_EQ(mid.masked_count(), 4u);
  EXPECT_FALSE(mid.masked[col(1, 0)]);
}

TEST(Feasibility, MinusInfinityMasksNothing) {
  Space s;
  EXPECT_EQ(feasibility_filter(s.space, s.attrs, s.objs, -kInf).masked_count(), 0u);
  EXPECT_THROW(feasibility_filter(s.space, s.attrs, s.objs, std::nan("")), ConfigError);
}

TEST(Feasibility, ThresholdAboveOneLeavesSeenOnly) {
  Space s;
  const FeasibleSpace all = feasibility_filter(s.space, s.attrs, s.objs, 1.5);
  for (std::size_t c = 0; c < 9; ++c) {
    EXPECT_EQ(all.masked[c] != 0, !s.space.is_seen(all.columns[c])) << c;
  }
  ScoreMatrix m(2, 9);
  m.truth = {static_cast<std::uint32_t>(col(0, 0)), static_cast<std::uint32_t>(col(1, 0))};
  for (std::size_t c = 0; c < 9; ++c) m.seen_mask[c] = s.space.is_seen(all.columns[c]);
  apply_feasibility(m, all);
  EXPECT_EQ(m.at(0, col(1, 0)), -kInf);
  EXPECT_THROW(bias_sweep(m), ProtocolError);
}

TEST(Feasibility, EmptyCoOccurrenceSides) {
  const LabelSpace space({"a0", "a1"}, {"o0", "o1"}, {{0, 0}}, {{1, 1}});
  const nn::Tensor t({2, 2}, {1, 0, 0.6, 0.8});
  const auto score = feasibility_scores(space, t, t);
  // (1,1): neither a1 nor o1 appears in a seen pair.
  EXPECT_EQ(score[3], 0.0);
  // (1,0): a1 has no seen objects; o0 was seen with a0 only.
  EXPECT_NEAR(score[2], 0.6, 1e-12);
}

TEST(Feasibility, ThresholdChoiceUsesValidationAuc) {
  Space s;
  ScoreMatrix val(2, 9);
  for (std::size_t c = 0; c < 9; ++c) val.seen_mask[c] = s.space.is_seen({static_cast<std::uint32_t>(c / 3),
                                                                           static_cast<std::uint32_t>(c % 3)});
  val.truth = {static_cast<std::uint32_t>(col(0, 0)), static_cast<std::uint32_t>(col(0, 2))};
  val.at(0, col(0, 0)) = 1.0;
  // The unseen row prefers the implausible pair over its truth.
  val.at(1, col(1, 2)) = 0.9;
  val.at(1, col(0, 2)) = 0.8;
  const std::vector<double> grid = {0.35, -1.0, 0.25};
  const ThresholdChoice pick = choose_threshold(s.space, s.attrs, s.objs, val, grid);
  EXPECT_EQ(pick.threshold, 0.25);
  EXPECT_DOUBLE_EQ(pick.auc, 1.0);
  // Equal AUC: the lower threshold wins.
  const std::vector<double> tied = {0.26, 0.25};
  EXPECT_EQ(choose_threshold(s.space, s.attrs, s.objs, val, tied).threshold, 0.25);
  const std::vector<double> hopeless = {2.0};
  EXPECT_THROW(choose_threshold(s.space, s.attrs, s.objs, val, hopeless), ProtocolError);
}

}  // namespace
}  // namespace velocomp::czsl
