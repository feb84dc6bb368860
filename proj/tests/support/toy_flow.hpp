// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

// Seeded 2-D two-Gaussian transport task shared by the flow unit tests and the
// acceptance binary.

#pragma once

#include <vector>

#include "velocomp/flow.hpp"
#include "velocomp/nn/optimizer.hpp"

namespace velocomp::toy {

inline const flow::Vec kSourceMean = {-2.0, 0.5};
inline const flow::Vec kTargetMean = {2.0, 1.0};
inline constexpr double kSpread = 0.3;

inline flow::Vec draw(Rng& rng, const flow::Vec& mean) {
  return {mean[0] + kSpread * rng.normal(), mean[1] + kSpread * rng.normal()};
}

// Label 0 is the target cluster, label 1 the source cluster.
inline flow::BranchVocabulary vocabulary() {
  return flow::BranchVocabulary(flow::Branch::kAttribute,
                                nn::Tensor({2, 2}, {kTargetMean[0], kTargetMean[1], kSourceMean[0], kSourceMean[1]}),
                                {"target", "source"});
}

inline std::vector<flow::FlowPair> pairs(Rng& rng, std::size_t n) {
  std::vector<flow::FlowPair> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({draw(rng, kSourceMean), draw(rng, kTargetMean), flow::Branch::kAttribute, 0});
  return out;
}

struct Trained {
  nn::VelocityNet net;
  flow::BranchVocabulary vocab;
  flow::FlowLossConfig loss{0.1, 1.0};
};

inline Trained train(std::size_t steps, std::uint64_t seed = 7, std::size_t frequencies = 8) {
  Trained out{nn::VelocityNet({2, 32, 2, frequencies}), vocabulary()};
  Rng rng(seed);
  Rng init = rng.split();
  out.net.init(init);
  nn::AdamW opt(out.net.parameters(), {.lr = 5e-3, .weight_decay = 0.0});
  for (std::size_t s = 0; s < steps; ++s) {
    const auto batch = pairs(rng, 64);
    std::vector<flow::Vec> x0, x1;
    std::vector<double> times;
    for (const auto& p : batch) {
      x0.push_back(p.x0);
      x1.push_back(p.x1);
      times.push_back(rng.uniform_closed());
    }
    nn::Graph g;
    g.backward(flow::fm_loss_graph(g, out.net, flow::stack_rows(x0), flow::stack_rows(x1), times, out.vocab,
                                   out.loss)
                   .total);
    opt.step();
  }
  return out;
}

}  // namespace velocomp::toy
