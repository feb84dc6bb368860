// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "velocomp/czsl/label_space.hpp"
#include "velocomp/flow.hpp"
#include "velocomp/nn/composer_net.hpp"
#include "velocomp/nn/velocity_net.hpp"

namespace velocomp::czsl {

using nn::Tensor;
using nn::Vec;

// <norm(query), norm(c_k)> / tau for every candidate row.
Vec cosine_scores(std::span<const double> query, const Tensor& candidates, double tau);
Vec softmax(std::span<const double> logits);

// score(a, o) = p_c(a, o) + p_a(a) p_o(o) for every pair; p_c is indexed like
// `pairs`. Probabilities must be non-negative.
Vec troika_fusion(std::span<const double> p_c, std::span<const double> p_a,
                  std::span<const double> p_o, std::span<const Pair> pairs);

// Everything needed to score samples against a candidate pair list with the
// transported endpoints.
struct FlowScorer {
  nn::VelocityNet* attr_flow = nullptr;
  nn::VelocityNet* obj_flow = nullptr;
  nn::ComposerNet* composer = nullptr;
  const flow::BranchVocabulary* attr_vocab = nullptr;
  const flow::BranchVocabulary* obj_vocab = nullptr;
  std::vector<Pair> candidates;
  Tensor candidate_texts;  // composition text per candidate, [P x D]
  double h = 0.1;
  double tau = 0.01;
  // Multi-path fuses p_c + p_a p_o; single-path scores with p_c alone.
  bool multi_path = true;
};

// Per-branch visual features of one sample. Single-path callers pass the same
// feature for all three.
struct BranchFeatures {
  std::span<const double> attr;
  std::span<const double> obj;
  std::span<const double> comp;
};

// Transported endpoints of one sample.
struct Endpoints {
  Vec attr;
  Vec obj;
  Vec comp;
};

Endpoints transport_endpoints(FlowScorer& scorer, const BranchFeatures& features);

// One ScoreMatrix row: softmax-normalized cosine scores of the endpoints
// against attribute, object and candidate composition texts, then fused.
Vec flow_pair_scores(FlowScorer& scorer, const BranchFeatures& features);

// Batched form over [B x D] feature rows; rows are split across `threads`
// workers, each row's result is independent of the split.
std::vector<Vec> flow_pair_scores_batch(FlowScorer& scorer, const Tensor& attr, const Tensor& obj,
                                        const Tensor& comp, std::size_t threads = 1);

}  // namespace velocomp::czsl
