// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "velocomp/data/synthetic.hpp"
#include "velocomp/error.hpp"
#include "velocomp/leakage.hpp"
#include "velocomp/pipeline/probe.hpp"

namespace velocomp::leakage {
namespace {

BranchVocabulary attr_vocab(std::vector<Vec> rows) {
  std::vector<double> flat;
  std::vector<std::string> labels;
  for (const auto& r : rows) {
    flat.insert(flat.end(), r.begin(), r.end());
    labels.push_back("a" + std::to_string(labels.size()));
  }
  return BranchVocabulary(Branch::kAttribute, Tensor({rows.size(), rows.front().size()}, flat), labels);
}

nn::VelocityNet zero_net(std::size_t dim) {
  nn::VelocityNet net({dim, 4, 1, 2});
  Rng rng(1);
  net.init(rng);
  return net;
}

TEST(LeakPath, Invariants) {
  EXPECT_THROW(LeakPath(Branch::kAttribute, Branch::kAttribute, {1}, {1}), ContractError);
  EXPECT_THROW(LeakPath(Branch::kAttribute, Branch::kComposition, {1}, {1}), ContractError);
  const LeakPath p(Branch::kComposition, Branch::kObject, {0.0, 2.0}, {1.0, 0.0});
  EXPECT_EQ(leak_interpolate(p, 0.0), p.x0());
  EXPECT_EQ(leak_interpolate(p, 1.0), p.x1());
  EXPECT_EQ(leak_interpolate(p, 0.5), (Vec{0.5, 1.0}));
  EXPECT_THROW(leak_interpolate(p, 1.5), DomainError);
}

TEST(LeakLosses, MseExample) {
  nn::VelocityNet net = zero_net(2);
  const std::vector<LeakPath> batch = {{Branch::kObject, Branch::kAttribute, {0.0, 1.0}, {1.0, 0.0}}};
  const std::vector<double> t = {0.4};
  EXPECT_DOUBLE_EQ(leak_mse_loss(net, batch, t), 2.0);
  EXPECT_THROW(leak_mse_loss(net, std::span<const LeakPath>{}, t), ContractError);
  Rng a(3), b(3);
  EXPECT_EQ(leak_mse_loss(net, batch, a), leak_mse_loss(net, batch, b));
}

TEST(LeakLosses, CrossEntropyExamples) {
  nn::VelocityNet net = zero_net(2);
  const std::vector<double> t = {0.0};
  // Zero velocity at t = 0: the endpoint is the leaked feature itself.
  const std::vector<LeakPath> single = {{Branch::kObject, Branch::kAttribute, {0.3, 0.9}, {1.0, 0.0}}};
  EXPECT_NEAR(leak_ce_loss(net, single, attr_vocab({{1.0, 0.0}}), 0.01, t), 0.0, 1e-15);
  const std::vector<LeakPath> middle = {{Branch::kObject, Branch::kAttribute, {1.0, 1.0}, {1.0, 0.0}}};
  EXPECT_NEAR(leak_ce_loss(net, middle, attr_vocab({{1.0, 0.0}, {0.0, 1.0}}), 0.01, t), std::log(2.0), 1e-12);
  // Cosines 0.8 and 0.2 against the two rows at tau = 1.
  const Vec q = {0.8, 0.6};
  const std::vector<LeakPath> hand = {{Branch::kComposition, Branch::kAttribute, q, {1.0, 0.0}}};
  const auto vocab = attr_vocab({{1.0, 0.0}, {0.2, std::sqrt(1.0 - 0.04)}});
  const double c1 = 0.8, c2 = 0.8 * 0.2 + 0.6 * std::sqrt(0.96);
  const double want = -std::log(std::exp(c1) / (std::exp(c1) + std::exp(c2)));
  EXPECT_NEAR(leak_ce_loss(net, hand, vocab, 1.0, t), want, 1e-12);
  const std::vector<LeakPath> wrong = {{Branch::kComposition, Branch::kObject, q, {1.0, 0.0}}};
  EXPECT_THROW(leak_ce_loss(net, wrong, vocab, 1.0, t), ContractError);
}

TEST(LeakLosses, WithinBranchReductionMatchesFlowLosses) {
  nn::VelocityNet net({3, 5, 2, 2});
  Rng rng(4);
  oracle::randomize(net.parameters(), rng);
  const auto vocab = attr_vocab({{1.0, 0.2, 0.0}, {0.0, 1.0, 0.3}, {0.5, 0.5, 1.0}});
  const std::vector<flow::FlowPair> within = {{{0.1, 0.4, -0.3}, {1.0, 0.2, 0.0}, Branch::kAttribute, 0},
                                              {{0.7, -0.1, 0.2}, {0.5, 0.5, 1.0}, Branch::kAttribute, 2}};
  std::vector<LeakPath> leaked;
  for (const auto& p : within) leaked.emplace_back(Branch::kObject, Branch::kAttribute, p.x0, p.x1, p.label);
  const std::vector<double> t = {0.3, 0.8};
  const flow::FlowLossConfig cfg{0.1, 1.0};
  const double flow_total = flow::branch_fm_loss(net, within, vocab, cfg, t);
  const double leak_total = leak_mse_loss(net, leaked, t) + leak_ce_loss(net, leaked, vocab, 0.1, t);
  EXPECT_NEAR(leak_total, flow_total, 1e-12);
}

TEST(LeakLosses, TotalAveragesPerSourceSums) {
  nn::VelocityNet net({2, 4, 1, 2});
  Rng init(5);
  oracle::randomize(net.parameters(), init);
  const auto vocab = attr_vocab({{1.0, 0.0}, {0.0, 1.0}});
  const std::vector<LeakPath> from_obj = {{Branch::kObject, Branch::kAttribute, {0.2, 0.9}, {1.0, 0.0}},
                                          {Branch::kObject, Branch::kAttribute, {-0.4, 0.3}, {0.0, 1.0}, 1}};
  const std::vector<LeakPath> from_comp = {{Branch::kComposition, Branch::kAttribute, {0.6, 0.6}, {0.0, 1.0}, 1}};
  const std::vector<std::vector<LeakPath>> both = {from_obj, from_comp};
  const flow::FlowLossConfig cfg{0.5, 1.0};
  Rng rng(6);
  const double total = leakage_total_loss(net, both, vocab, cfg, rng);
  // Replay the same time draws: one per path, source by source.
  Rng replay(6);
  std::vector<double> t_obj = {replay.uniform_closed(), replay.uniform_closed()};
  std::vector<double> t_comp = {replay.uniform_closed()};
  const double obj_sum = leak_mse_loss(net, from_obj, t_obj) + leak_ce_loss(net, from_obj, vocab, 0.5, t_obj);
  const double comp_sum = leak_mse_loss(net, from_comp, t_comp) + leak_ce_loss(net, from_comp, vocab, 0.5, t_comp);
  EXPECT_NEAR(total, 0.5 * (obj_sum + comp_sum), 1e-12);
  const std::vector<std::vector<LeakPath>> none;
  EXPECT_THROW(leakage_total_loss(net, none, vocab, cfg, rng), ContractError);
}

TEST(Probe, OwnTextFeaturesAreDiagonal) {
  const auto attrs = attr_vocab({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const BranchVocabulary objs(Branch::kObject, Tensor({2, 3}, {1, 1, 0, 0, 1, 1}), {"o0", "o1"});
  std::vector<LabeledFeature> af, of;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t o = 0; o < 2; ++o) {
      const auto ar = attrs.row(a), orow = objs.row(o);
      af.push_back({Vec(ar.begin(), ar.end()), a, o});
      of.push_back({Vec(orow.begin(), orow.end()), a, o});
    }
  const std::vector<std::vector<LabeledFeature>> by_branch = {af, of};
  const std::vector<Branch> branches = {Branch::kAttribute, Branch::kObject};
  const auto cells = leakage_probe(by_branch, branches, attrs, objs);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].feature_branch, "random");
  EXPECT_DOUBLE_EQ(cells[0].chance, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(cells[1].chance, 0.5);
  EXPECT_EQ(cells[2].feature_branch, "attribute");
  EXPECT_EQ(cells[2].label_kind, "attribute");
  EXPECT_DOUBLE_EQ(cells[2].balanced_accuracy, 1.0);
  EXPECT_EQ(cells[5].feature_branch, "object");
  EXPECT_EQ(cells[5].label_kind, "object");
  EXPECT_DOUBLE_EQ(cells[5].balanced_accuracy, 1.0);
  EXPECT_EQ(probe_csv(cells).substr(0, 51), "feature_branch,label_kind,balanced_accuracy,chance\n");
}

TEST(Probe, EmptyClassesAreReportedAndExcluded) {
  const auto attrs = attr_vocab({{1, 0}, {0, 1}, {-1, 0}});
  std::vector<Vec> feats = {{1, 0.1}, {0.1, 1}};
  std::vector<std::size_t> labels = {0, 0};
  std::vector<std::size_t> empty;
  EXPECT_DOUBLE_EQ(balanced_accuracy(feats, labels, attrs, &empty), 0.5);
  EXPECT_EQ(empty, (std::vector<std::size_t>{1, 2}));
}

TEST(Probe, RandomFeaturesSitAtChance) {
  const std::size_t k = 5, n = 4000;
  Rng rng(7);
  std::vector<Vec> rows;
  for (std::size_t i = 0; i < k; ++i) rows.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
  const auto vocab = attr_vocab(rows);
  std::vector<Vec> feats;
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < n; ++i) {
    feats.push_back({rng.normal(), rng.normal(), rng.normal(), rng.normal()});
    labels.push_back(rng.below(k));
  }
  // Labels are independent of the features, so each class's hit rate is the
  // share of space its row wins; their average is exactly 1/K in expectation.
  const double acc = balanced_accuracy(feats, labels, vocab);
  const double sigma = std::sqrt((1.0 / k) * (1.0 - 1.0 / k) / static_cast<double>(n));
  EXPECT_NEAR(acc, 1.0 / k, 3.0 * sigma * std::sqrt(static_cast<double>(k)));
}

double cross_cell_mean(double leak) {
  data::SyntheticConfig cfg;
  cfg.leakage = leak;
  cfg.seed = 11;
  // The visual rotation scrambles text alignment for every cell alike; the
  // probe is about the leak term, so measure it without the rotation.
  cfg.modality_gap = 0.0;
  const auto cells = pipeline::probe_dataset(data::generate_synthetic(cfg));
  // attribute features -> object labels, object features -> attribute labels
  return 0.5 * (cells[3].balanced_accuracy + cells[4].balanced_accuracy);
}

TEST(Probe, CrossBranchAccuracyGrowsWithLeakage) {
  const double none = cross_cell_mean(0.0), some = cross_cell_mean(0.25), more = cross_cell_mean(0.5);
  EXPECT_LE(none, some);
  EXPECT_LE(some, more);
  EXPECT_LT(none, 0.125 + 0.1);
  EXPECT_GT(more, 0.125 + 0.2);
}

}  // namespace
}  // namespace velocomp::leakage
