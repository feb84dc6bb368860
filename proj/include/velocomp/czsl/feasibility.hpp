// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "velocomp/czsl/label_space.hpp"
#include "velocomp/czsl/metrics.hpp"
#include "velocomp/nn/tensor.hpp"

namespace velocomp::czsl {

// Open-world columns (full product, row-major) with their co-occurrence
// scores and the mask produced by a threshold.
struct FeasibleSpace {
  std::vector<Pair> columns;
  std::vector<double> score;
  std::vector<std::uint8_t> masked;
  double threshold = 0.0;

  std::size_t masked_count() const;
};

// Score of (a, o): mean of the best cosine between o and the objects seen with
// a, and the best cosine between a and the attributes seen with o. With one
// side empty only the other is used; with both empty the score is 0.
std::vector<double> feasibility_scores(const LabelSpace& space, const nn::Tensor& attr_texts,
                                       const nn::Tensor& obj_texts);

// Seen pairs are never masked. A threshold of -inf masks nothing.
FeasibleSpace feasibility_filter(const LabelSpace& space, const nn::Tensor& attr_texts,
                                 const nn::Tensor& obj_texts, double threshold);

// Sets every masked column to -inf in place. Column order must match.
void apply_feasibility(ScoreMatrix& scores, const FeasibleSpace& space);

// Threshold from `grid` with the highest validation AUC; ties keep the lower
// threshold. Thresholds that leave no unseen column are skipped. Throws
// ProtocolError when none is usable.
struct ThresholdChoice {
  double threshold = 0.0;
  double auc = 0.0;
};
ThresholdChoice choose_threshold(const LabelSpace& space, const nn::Tensor& attr_texts,
                                 const nn::Tensor& obj_texts, const ScoreMatrix& validation,
                                 std::span<const double> grid);

std::vector<double> default_threshold_grid();

}  // namespace velocomp::czsl
