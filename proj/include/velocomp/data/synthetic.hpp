// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "velocomp/data/dataset.hpp"

namespace velocomp::data {

// Latent unit vectors A_a, B_o give attribute and object texts; composition
// text is normalize(A_a + B_o). Visual features of branch i are
// G (text_i + noise + leakage * text_j), where G = (1 - modality_gap) I +
// modality_gap R with R a seeded random rotation. Composition features carry
// no leak term. modality_gap = 0 puts features in the text space.
struct SyntheticConfig {
  std::size_t attributes = 8;
  std::size_t objects = 8;
  std::size_t dim = 32;
  double seen_fraction = 0.5;
  double attr_noise = 0.05;
  double obj_noise = 0.05;
  double leakage = 0.25;
  double modality_gap = 0.8;
  std::size_t train_per_pair = 8;
  // Samples per pair in each of val and test, for seen and unseen pairs alike.
  std::size_t eval_per_pair = 4;
  bool multi_path = true;
  std::uint64_t seed = 0;

  // Throws ConfigError on any violated precondition.
  void validate() const;
  std::size_t seen_count() const;
};

EmbeddingDataset generate_synthetic(const SyntheticConfig& config);

}  // namespace velocomp::data
