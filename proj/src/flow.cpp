// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/flow.hpp"

#include <algorithm>
#include <cmath>

#include "velocomp/error.hpp"

namespace velocomp::flow {

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::kAttribute: return "attribute";
    case Branch::kObject: return "object";
    case Branch::kComposition: return "composition";
  }
  return "unknown";
}

BranchVocabulary::BranchVocabulary(Branch branch, Tensor embeddings, std::vector<std::string> labels)
    : branch_(branch), embeddings_(std::move(embeddings)), labels_(std::move(labels)) {
  if (embeddings_.rank() != 2) throw ShapeError("vocabulary embeddings must be rank 2");
  if (embeddings_.rows() != labels_.size()) {
    throw ShapeError("vocabulary has " + std::to_string(embeddings_.rows()) + " rows but " +
                     std::to_string(labels_.size()) + " labels");
  }
  if (!embeddings_.all_finite()) throw DataError("vocabulary contains non-finite entries");
  normalized_ = embeddings_;
  for (std::size_t r = 0; r < normalized_.rows(); ++r) {
    const Vec n = nn::normalized(embeddings_.row_view(r));
    std::copy(n.begin(), n.end(), normalized_.row_view(r).begin());
  }
}

Vec interpolate(const FlowPair& pair, double t) {
  nn::check_time(t);
  nn::require_same_width(pair.x0, pair.x1, "interpolate");
  Vec out(pair.x0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - t) * pair.x0[i] + t * pair.x1[i];
  return out;
}

Vec velocity_target(const FlowPair& pair) {
  nn::require_same_width(pair.x0, pair.x1, "velocity_target");
  Vec out(pair.x0.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pair.x1[i] - pair.x0[i];
  return out;
}

double fm_mse_loss(std::span<const double> predicted, const FlowPair& pair) {
  const Vec target = velocity_target(pair);
  nn::require_same_width(predicted, target, "fm_mse_loss");
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) acc += (predicted[i] - target[i]) * (predicted[i] - target[i]);
  return acc;
}

Vec endpoint_predict(std::span<const double> x_t, std::span<const double> v_hat, double t) {
  nn::check_time(t);
  nn::require_same_width(x_t, v_hat, "endpoint_predict");
  Vec out(x_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x_t[i] + (1.0 - t) * v_hat[i];
  return out;
}

double endpoint_ce_loss(std::span<const double> x1_hat, std::size_t true_index,
                        const BranchVocabulary& vocab, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (true_index >= vocab.size()) throw ContractError("true label index out of range");
  if (x1_hat.size() != vocab.dim()) throw ShapeError("endpoint width does not match vocabulary");
  const Vec q = nn::normalized(x1_hat);
  std::vector<double> logits(vocab.size());
  for (std::size_t k = 0; k < vocab.size(); ++k) logits[k] = nn::dot(q, vocab.normalized().row_view(k)) / tau;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double l : logits) total += std::exp(l - peak);
  return peak + std::log(total) - logits[true_index];
}

FlowLossTerms fm_loss_graph(nn::Graph& g, nn::VelocityNet& net, const Tensor& x0, const Tensor& x1,
                            std::span<const double> times, const BranchVocabulary& vocab,
                            const FlowLossConfig& config) {
  if (x0.rows() == 0) throw ContractError("flow loss on an empty batch");
  if (!x0.same_shape(x1)) throw ShapeError("x0 and x1 batches differ in shape");
  if (times.size() != x0.rows()) throw ShapeError("one time per row required");
  if (!(config.tau > 0.0)) throw ConfigError("temperature must be positive");
  const std::size_t rows = x0.rows(), cols = x0.cols();
  Tensor x_t({rows, cols}, 0.0);
  Tensor target({rows, cols}, 0.0);
  Tensor remaining({rows, cols}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    nn::check_time(times[r]);
    for (std::size_t c = 0; c < cols; ++c) {
      x_t(r, c) = (1.0 - times[r]) * x0(r, c) + times[r] * x1(r, c);
      target(r, c) = x1(r, c) - x0(r, c);
      remaining(r, c) = 1.0 - times[r];
    }
  }
  nn::Var xt = g.constant(x_t);
  nn::Var v = net.forward(g, xt, times);
  nn::Var mse = g.mean(g.row_sq_norm(g.sub(v, g.constant(std::move(target)))));

  nn::Var endpoint = g.add(xt, g.mul(g.constant(std::move(remaining)), v));
  nn::Var unit = g.row_normalize(endpoint);
  nn::Var own = g.row_normalize(g.constant(x1));
  const double inv_tau = 1.0 / config.tau;
  nn::Var numerator = g.scale(g.row_dot(unit, own), inv_tau);
  nn::Var logits = g.scale(g.matmul_nt(unit, g.constant(vocab.normalized())), inv_tau);
  nn::Var ce = g.mean(g.sub(g.row_logsumexp(logits), numerator));
  nn::Var total = config.ce_weight == 1.0 ? g.add(mse, ce) : g.add(mse, g.scale(ce, config.ce_weight));
  return {total, mse, ce};
}

Tensor stack_rows(std::span<const Vec> rows) {
  if (rows.empty()) return Tensor({0, 0}, 0.0);
  const std::size_t cols = rows.front().size();
  Tensor out({rows.size(), cols}, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ShapeError("stack_rows: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), out.row_view(r).begin());
  }
  return out;
}

double branch_fm_loss(nn::VelocityNet& net, std::span<const FlowPair> batch,
                      const BranchVocabulary& vocab, const FlowLossConfig& config,
                      std::span<const double> times) {
  if (batch.empty()) throw ContractError("branch_fm_loss on an empty batch");
  std::vector<Vec> x0, x1;
  for (const FlowPair& p : batch) {
    if (p.branch != vocab.branch()) throw ContractError("flow pair branch does not match vocabulary");
    x0.push_back(p.x0);
    x1.push_back(p.x1);
  }
  nn::Graph g;
  return g.value(fm_loss_graph(g, net, stack_rows(x0), stack_rows(x1), times, vocab, config).total).item();
}

double branch_fm_loss(nn::VelocityNet& net, std::span<const FlowPair> batch,
                      const BranchVocabulary& vocab, const FlowLossConfig& config, Rng& rng) {
  std::vector<double> times(batch.size());
  for (double& t : times) t = rng.uniform_closed();
  return branch_fm_loss(net, batch, vocab, config, times);
}

VelocityField field_of(nn::VelocityNet& net) {
  return [&net](std::span<const double> x, double t) { return net.velocity(x, t); };
}

Vec one_step_transport(const VelocityField& field, std::span<const double> x0) {
  const Vec v = field(x0, 0.0);
  nn::require_same_width(x0, v, "one_step_transport");
  Vec out(x0.begin(), x0.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  return out;
}

Vec one_step_transport(nn::VelocityNet& net, std::span<const double> x0) {
  return one_step_transport(field_of(net), x0);
}

Tensor one_step_transport(nn::VelocityNet& net, const Tensor& x0) {
  const std::vector<double> zeros(x0.rows(), 0.0);
  Tensor out = net.forward(x0, zeros);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += x0[i];
  return out;
}

Vec euler_integrate(const VelocityField& field, std::span<const double> x0, std::size_t steps) {
  if (steps == 0) throw ContractError("euler_integrate needs at least one step");
  const double dt = 1.0 / static_cast<double>(steps);
  Vec x(x0.begin(), x0.end());
  for (std::size_t k = 0; k < steps; ++k) {
    const Vec v = field(x, static_cast<double>(k) * dt);
    nn::require_same_width(x, v, "euler_integrate");
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt * v[i];
  }
  return x;
}

Vec euler_integrate(nn::VelocityNet& net, std::span<const double> x0, std::size_t steps) {
  return euler_integrate(field_of(net), x0, steps);
}

}  // namespace velocomp::flow
