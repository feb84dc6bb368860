// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "velocomp/nn/linear.hpp"
#include "velocomp/nn/timestep.hpp"

namespace velocomp::nn {

struct VelocityNetConfig {
  std::size_t dim = 0;
  std::size_t width = 64;
  std::size_t blocks = 4;
  std::size_t frequencies = 16;
};

// Time-conditioned residual MLP v(x, t).
//
//   h   = in_proj(x)
//   c   = SiLU(timestep_embed(t))
//   per block:  (shift, scale, gate) = ada(c)
//               h += gate * fc2(SiLU(fc1(LN(h) * (1 + scale) + shift)))
//   v   = head(LN(h))
//
// The head is not modulated, so zero gates make v independent of t.
class VelocityNet {
 public:
  VelocityNet() = default;
  explicit VelocityNet(const VelocityNetConfig& config);

  const VelocityNetConfig& config() const { return config_; }
  std::size_t dim() const { return config_.dim; }

  // Fan-in Gaussian weights; gate slices and the output head start at zero so
  // an untrained net is the identity transport.
  void init(Rng& rng);
  void zero_gates();

  Var forward(Graph& g, Var x, std::span<const double> times);
  // Batch inference on [B x D] rows, one time per row.
  Tensor forward(const Tensor& x, std::span<const double> times);
  Vec velocity(std::span<const double> x, double t);

  ParameterList parameters();
  Linear& head() { return head_; }
  TimestepEmbedder& embedder() { return embedder_; }

  // Rebuilds architecture from parameter shapes in a checkpoint.
  static VelocityNet load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path);

 private:
  struct Block {
    Linear ada;
    Linear fc1;
    Linear fc2;
  };

  VelocityNetConfig config_;
  TimestepEmbedder embedder_;
  Linear in_proj_;
  std::vector<Block> blocks_;
  Linear head_;
};

}  // namespace velocomp::nn
