// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "velocomp/flow.hpp"

namespace velocomp::leakage {

using flow::Branch;
using flow::BranchVocabulary;
using nn::Tensor;
using nn::Vec;

// Cross-branch path: a visual feature from stream `source` transported to the
// text embedding of primitive `target`.
class LeakPath {
 public:
  // Throws ContractError if source == target or target is the composition.
  LeakPath(Branch source, Branch target, Vec x0, Vec x1, std::size_t label = 0);

  Branch source() const { return source_; }
  Branch target() const { return target_; }
  const Vec& x0() const { return x0_; }
  const Vec& x1() const { return x1_; }
  std::size_t label() const { return label_; }

 private:
  Branch source_;
  Branch target_;
  Vec x0_;
  Vec x1_;
  std::size_t label_;
};

// (1 - t) x0_j + t x1_i
Vec leak_interpolate(const LeakPath& path, double t);

// mean ||v_i(x_t, t) - (x1_i - x0_j)||^2, one t ~ U[0, 1] per path.
double leak_mse_loss(nn::VelocityNet& net, std::span<const LeakPath> batch, Rng& rng);
double leak_mse_loss(nn::VelocityNet& net, std::span<const LeakPath> batch,
                     std::span<const double> times);

// Endpoint cross-entropy on the leaked paths against the target vocabulary.
double leak_ce_loss(nn::VelocityNet& net, std::span<const LeakPath> batch,
                    const BranchVocabulary& vocab, double tau, Rng& rng);
double leak_ce_loss(nn::VelocityNet& net, std::span<const LeakPath> batch,
                    const BranchVocabulary& vocab, double tau, std::span<const double> times);

// Leak batches for one target branch, grouped by source stream.
struct SourceBatch {
  Branch source;
  Tensor x0;
  Tensor x1;
};

// Average over source streams of (MSE-leak + CE-leak) for the target branch,
// built on the graph. `times` holds one vector per source batch.
nn::Var leakage_loss_graph(nn::Graph& g, nn::VelocityNet& net, std::span<const SourceBatch> sources,
                           std::span<const std::vector<double>> times, const BranchVocabulary& vocab,
                           const flow::FlowLossConfig& config);

double leakage_total_loss(nn::VelocityNet& net, std::span<const std::vector<LeakPath>> by_source,
                          const BranchVocabulary& vocab, const flow::FlowLossConfig& config, Rng& rng);

// ---- Cross-branch leakage probe ----

struct LabeledFeature {
  Vec feature;
  std::size_t attr = 0;
  std::size_t obj = 0;
};

struct ProbeCell {
  std::string feature_branch;  // "random", "attribute", "object", "composition"
  std::string label_kind;      // "attribute" or "object"
  double balanced_accuracy = 0.0;
  double chance = 0.0;
  // Label indices with no samples; excluded from the balanced average.
  std::vector<std::size_t> empty_classes;
};

// Class-balanced top-1 accuracy of cosine classification for every
// (feature branch, label kind) cell, preceded by the analytic chance row.
std::vector<ProbeCell> leakage_probe(std::span<const std::vector<LabeledFeature>> features_by_branch,
                                     std::span<const Branch> branches, const BranchVocabulary& attr_vocab,
                                     const BranchVocabulary& obj_vocab);

// Per-class-averaged accuracy of argmax cosine classification.
double balanced_accuracy(std::span<const Vec> features, std::span<const std::size_t> labels,
                         const BranchVocabulary& vocab, std::vector<std::size_t>* empty_classes = nullptr);

std::string probe_table(std::span<const ProbeCell> cells);
std::string probe_csv(std::span<const ProbeCell> cells);

}  // namespace velocomp::leakage
