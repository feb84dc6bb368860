// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace velocomp::czsl {

// Scores of every evaluation row against every candidate pair. A column set
// to -inf in a row is masked and can never be predicted.
struct ScoreMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> scores;            // row-major rows x cols
  std::vector<std::uint32_t> truth;      // per row, a column index
  std::vector<std::uint8_t> seen_mask;   // per column, 1 = seen pair

  ScoreMatrix() = default;
  ScoreMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), scores(r * c, 0.0), truth(r, 0), seen_mask(c, 0) {}

  double& at(std::size_t r, std::size_t c) { return scores[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return scores[r * cols + c]; }

  // Sizes agree, truth indices are in range, no NaN or +inf, and every row's
  // truth entry is finite unless the column was masked.
  void validate() const;
};

inline constexpr double kMasked = -std::numeric_limits<double>::infinity();

struct CurvePoint {
  double bias = 0.0;
  double seen = 0.0;
  double unseen = 0.0;
};

struct EvalReport {
  double best_seen = 0.0;
  double best_unseen = 0.0;
  double best_hm = 0.0;
  double auc = 0.0;
  // Ordered by increasing bias, starting at -inf and ending at +inf.
  std::vector<CurvePoint> curve;
};

// 2su / (s + u), 0 when s + u == 0.
double harmonic_mean(double s, double u);

// Trapezoidal area under unseen(seen) after sorting by seen accuracy and
// adding the (0, best_unseen) and (best_seen, 0) endpoints.
double curve_auc(std::span<const CurvePoint> curve);

// Calibration-bias sweep. A scalar bias is added to every unseen column; the
// argmax of a row (lowest column wins ties) can only change where the bias
// crosses that row's gap  max(seen scores) - max(unseen scores). The sweep
// therefore visits -inf, one bias inside each open interval between
// consecutive distinct gaps, and +inf. Throws ProtocolError when no row is
// labeled with a seen pair, none with an unseen pair, or no unseen column can
// ever be predicted.
EvalReport bias_sweep(const ScoreMatrix& scores);

// Prediction of one row with `bias` added to the unseen columns.
std::size_t predict_with_bias(const ScoreMatrix& scores, std::size_t row, double bias);

}  // namespace velocomp::czsl
