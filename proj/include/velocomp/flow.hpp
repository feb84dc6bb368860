// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "velocomp/nn/graph.hpp"
#include "velocomp/nn/velocity_net.hpp"
#include "velocomp/rng.hpp"

namespace velocomp::flow {

using nn::Tensor;
using nn::Vec;

enum class Branch : std::uint8_t { kAttribute = 0, kObject = 1, kComposition = 2 };

std::string_view branch_name(Branch b);

// One source/target pair on a straight path. `label` indexes the target's row
// in the branch vocabulary.
struct FlowPair {
  Vec x0;
  Vec x1;
  Branch branch = Branch::kAttribute;
  std::size_t label = 0;
};

// All text embeddings of one branch, one row per label.
class BranchVocabulary {
 public:
  BranchVocabulary() = default;
  BranchVocabulary(Branch branch, Tensor embeddings, std::vector<std::string> labels);

  Branch branch() const { return branch_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return embeddings_.cols(); }
  const Tensor& embeddings() const { return embeddings_; }
  // Rows scaled to unit length (zero rows stay zero).
  const Tensor& normalized() const { return normalized_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::span<const double> row(std::size_t k) const { return embeddings_.row_view(k); }

 private:
  Branch branch_ = Branch::kAttribute;
  Tensor embeddings_;
  Tensor normalized_;
  std::vector<std::string> labels_;
};

struct FlowLossConfig {
  double tau = 0.01;
  // Weight on the endpoint cross-entropy; the plain sum uses 1.
  double ce_weight = 1.0;
};

// x_t = (1 - t) x0 + t x1
Vec interpolate(const FlowPair& pair, double t);
// x1 - x0
Vec velocity_target(const FlowPair& pair);
// ||predicted - (x1 - x0)||^2
double fm_mse_loss(std::span<const double> predicted, const FlowPair& pair);
// x_t + (1 - t) v_hat
Vec endpoint_predict(std::span<const double> x_t, std::span<const double> v_hat, double t);
// -log softmax_k(<norm(x1_hat), norm(t_k)> / tau) at true_index.
double endpoint_ce_loss(std::span<const double> x1_hat, std::size_t true_index,
                        const BranchVocabulary& vocab, double tau);

// Graph form of the per-branch objective on a batch of rows:
//   mean_b ||v(x_t, t) - (x1 - x0)||^2 + w * CE(x_t + (1 - t) v, x1)
// where the CE numerator uses the row's own x1 and the denominator the
// vocabulary. x0/x1 are [B x D], one time per row.
struct FlowLossTerms {
  nn::Var total;
  nn::Var mse;
  nn::Var ce;
};
FlowLossTerms fm_loss_graph(nn::Graph& g, nn::VelocityNet& net, const Tensor& x0, const Tensor& x1,
                            std::span<const double> times, const BranchVocabulary& vocab,
                            const FlowLossConfig& config);

// Draws one t ~ U[0, 1] per pair (in order) and evaluates the objective.
double branch_fm_loss(nn::VelocityNet& net, std::span<const FlowPair> batch,
                      const BranchVocabulary& vocab, const FlowLossConfig& config, Rng& rng);
double branch_fm_loss(nn::VelocityNet& net, std::span<const FlowPair> batch,
                      const BranchVocabulary& vocab, const FlowLossConfig& config,
                      std::span<const double> times);

using VelocityField = std::function<Vec(std::span<const double> x, double t)>;

VelocityField field_of(nn::VelocityNet& net);

// x0 + v(x0, 0)
Vec one_step_transport(nn::VelocityNet& net, std::span<const double> x0);
Vec one_step_transport(const VelocityField& field, std::span<const double> x0);
// Row-wise one-step transport of a [B x D] batch.
Tensor one_step_transport(nn::VelocityNet& net, const Tensor& x0);

// Explicit Euler from t = 0 to 1 with uniform step 1/steps.
Vec euler_integrate(const VelocityField& field, std::span<const double> x0, std::size_t steps);
Vec euler_integrate(nn::VelocityNet& net, std::span<const double> x0, std::size_t steps);

Tensor stack_rows(std::span<const Vec> rows);

}  // namespace velocomp::flow
