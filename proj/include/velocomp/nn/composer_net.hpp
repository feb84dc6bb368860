// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <utility>

#include "velocomp/nn/linear.hpp"

namespace velocomp::nn {

struct ComposerNetConfig {
  std::size_t dim = 0;
  std::size_t width = 64;
  std::size_t blocks = 2;
};

// Maps [delta_a || delta_o] (2D wide) to the two mixing coefficients.
//   h = in_proj(x); h += fc2(GELU(fc1(LN(h)))) per block; out = head(GELU(LN(h)))
class ComposerNet {
 public:
  ComposerNet() = default;
  explicit ComposerNet(const ComposerNetConfig& config);

  const ComposerNetConfig& config() const { return config_; }
  std::size_t dim() const { return config_.dim; }

  void init(Rng& rng);

  // input [B x 2D] -> [B x 2]
  Var forward(Graph& g, Var input);
  // Concatenates the two directions in [attribute || object] order.
  std::pair<double, double> coefficients(std::span<const double> delta_a,
                                         std::span<const double> delta_o);

  ParameterList parameters();
  Linear& head() { return head_; }

  static ComposerNet load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path);

 private:
  struct Block {
    Linear fc1;
    Linear fc2;
  };

  ComposerNetConfig config_;
  Linear in_proj_;
  std::vector<Block> blocks_;
  Linear head_;
};

}  // namespace velocomp::nn
