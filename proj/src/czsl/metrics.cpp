// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/czsl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "velocomp/error.hpp"

namespace velocomp::czsl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

struct RowBest {
  std::size_t seen_col = kNone;
  std::size_t unseen_col = kNone;
  double seen_score = -kInf;
  double unseen_score = -kInf;
};

RowBest row_best(const ScoreMatrix& m, std::size_t r) {
  RowBest b;
  for (std::size_t c = 0; c < m.cols; ++c) {
    const double s = m.at(r, c);
    if (s == kMasked) continue;
    if (m.seen_mask[c]) {
      if (b.seen_col == kNone || s > b.seen_score) {
        b.seen_col = c;
        b.seen_score = s;
      }
    } else if (b.unseen_col == kNone || s > b.unseen_score) {
      b.unseen_col = c;
      b.unseen_score = s;
    }
  }
  return b;
}

}  // namespace

void ScoreMatrix::validate() const {
  if (scores.size() != rows * cols) throw ShapeError("score matrix payload does not match rows x cols");
  if (truth.size() != rows) throw ShapeError("score matrix needs one truth index per row");
  if (seen_mask.size() != cols) throw ShapeError("score matrix needs one seen flag per column");
  for (std::size_t r = 0; r < rows; ++r) {
    if (truth[r] >= cols) throw DataError("truth index out of range in row " + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) {
      const double s = at(r, c);
      if (std::isnan(s) || s == kInf) {
        throw DataError("score matrix entry (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") is not finite");
      }
    }
  }
}

double harmonic_mean(double s, double u) {
  if (s + u == 0.0) return 0.0;
  return 2.0 * s * u / (s + u);
}

double curve_auc(std::span<const CurvePoint> curve) {
  double best_seen = 0.0, best_unseen = 0.0;
  for (const auto& p : curve) {
    best_seen = std::max(best_seen, p.seen);
    best_unseen = std::max(best_unseen, p.unseen);
  }
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.size() + 2);
  pts.emplace_back(0.0, best_unseen);
  for (const auto& p : curve) pts.emplace_back(p.seen, p.unseen);
  pts.emplace_back(best_seen, 0.0);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });
  double area = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2.0;
  }
  return area;
}

std::size_t predict_with_bias(const ScoreMatrix& m, std::size_t r, double bias) {
  const RowBest b = row_best(m, r);
  if (b.seen_col == kNone) return b.unseen_col;
  if (b.unseen_col == kNone) return b.seen_col;
  const double shifted = b.unseen_score + bias;
  if (shifted > b.seen_score) return b.unseen_col;
  if (shifted < b.seen_score) return b.seen_col;
  return std::min(b.seen_col, b.unseen_col);
}

EvalReport bias_sweep(const ScoreMatrix& m) {
  m.validate();
  std::size_t n_seen = 0, n_unseen = 0;
  for (std::size_t r = 0; r < m.rows; ++r) (m.seen_mask[m.truth[r]] ? n_seen : n_unseen) += 1;
  if (n_seen == 0) throw ProtocolError("bias sweep needs at least one row labeled with a seen pair");
  if (n_unseen == 0) throw ProtocolError("bias sweep needs at least one row labeled with an unseen pair");

  // Per-row outcome before and after the row flips to its best unseen column.
  struct Flip {
    double gap;
    int seen_delta;
    int unseen_delta;
  };
  std::vector<Flip> flips;
  long seen_hits = 0, unseen_hits = 0;
  bool any_unseen_column = false;
  for (std::size_t r = 0; r < m.rows; ++r) {
    const RowBest b = row_best(m, r);
    const bool truth_seen = m.seen_mask[m.truth[r]] != 0;
    const std::size_t truth = m.truth[r];
    if (b.unseen_col != kNone) any_unseen_column = true;
    // Prediction at -inf.
    const std::size_t first = b.seen_col != kNone ? b.seen_col : b.unseen_col;
    const bool hit_before = first == truth;
    if (hit_before) (truth_seen ? seen_hits : unseen_hits) += 1;
    if (b.seen_col == kNone || b.unseen_col == kNone) continue;
    const bool hit_after = b.unseen_col == truth;
    if (hit_before == hit_after) continue;
    const int delta = hit_after ? 1 : -1;
    flips.push_back({b.seen_score - b.unseen_score, truth_seen ? delta : 0, truth_seen ? 0 : delta});
  }
  if (!any_unseen_column) throw ProtocolError("every unseen column is masked; nothing to sweep");

  std::sort(flips.begin(), flips.end(), [](const Flip& a, const Flip& b) { return a.gap < b.gap; });

  EvalReport report;
  const double seen_total = static_cast<double>(n_seen);
  const double unseen_total = static_cast<double>(n_unseen);
  auto record = [&](double bias) {
    report.curve.push_back({bias, static_cast<double>(seen_hits) / seen_total,
                            static_cast<double>(unseen_hits) / unseen_total});
  };
  record(-kInf);
  std::size_t i = 0;
  while (i < flips.size()) {
    const double gap = flips[i].gap;
    while (i < flips.size() && flips[i].gap == gap) {
      seen_hits += flips[i].seen_delta;
      unseen_hits += flips[i].unseen_delta;
      ++i;
    }
    if (i < flips.size()) record(gap + (flips[i].gap - gap) / 2.0);
  }
  record(kInf);

  for (const auto& p : report.curve) {
    report.best_seen = std::max(report.best_seen, p.seen);
    report.best_unseen = std::max(report.best_unseen, p.unseen);
    report.best_hm = std::max(report.best_hm, harmonic_mean(p.seen, p.unseen));
  }
  report.auc = curve_auc(report.curve);
  return report;
}

}  // namespace velocomp::czsl
