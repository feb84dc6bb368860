// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/czsl/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "velocomp/error.hpp"

namespace velocomp::czsl {
namespace {

double cosine(std::span<const double> a, std::span<const double> b) {
  return nn::dot(nn::normalized(a), nn::normalized(b));
}

}  // namespace

std::size_t FeasibleSpace::masked_count() const {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), 1));
}

std::vector<double> feasibility_scores(const LabelSpace& space, const nn::Tensor& attr_texts,
                                       const nn::Tensor& obj_texts) {
  const std::size_t m = space.attribute_count(), n = space.object_count();
  if (attr_texts.rows() != m || obj_texts.rows() != n) {
    throw ShapeError("feasibility needs one text row per attribute and object");
  }
  std::vector<std::vector<std::uint32_t>> objs_of(m), attrs_of(n);
  for (Pair p : space.seen()) {
    objs_of[p.attr].push_back(p.obj);
    attrs_of[p.obj].push_back(p.attr);
  }
  constexpr double kNoSide = -std::numeric_limits<double>::infinity();
  std::vector<double> out(m * n, 0.0);
  for (std::uint32_t a = 0; a < m; ++a) {
    for (std::uint32_t o = 0; o < n; ++o) {
      double obj_side = kNoSide, attr_side = kNoSide;
      for (std::uint32_t k : objs_of[a]) obj_side = std::max(obj_side, cosine(obj_texts.row_view(o), obj_texts.row_view(k)));
      for (std::uint32_t k : attrs_of[o]) attr_side = std::max(attr_side, cosine(attr_texts.row_view(a), attr_texts.row_view(k)));
      double s = 0.0;
      if (obj_side != kNoSide && attr_side != kNoSide) {
        s = 0.5 * (obj_side + attr_side);
      } else if (obj_side != kNoSide) {
        s = obj_side;
      } else if (attr_side != kNoSide) {
        s = attr_side;
      }
      out[a * n + o] = s;
    }
  }
  return out;
}

FeasibleSpace feasibility_filter(const LabelSpace& space, const nn::Tensor& attr_texts,
                                 const nn::Tensor& obj_texts, double threshold) {
  if (std::isnan(threshold)) throw ConfigError("feasibility threshold is NaN");
  FeasibleSpace f;
  f.threshold = threshold;
  f.columns = space.test_pairs(Protocol::kOpen);
  f.score = feasibility_scores(space, attr_texts, obj_texts);
  f.masked.assign(f.columns.size(), 0);
  for (std::size_t c = 0; c < f.columns.size(); ++c) {
    if (!space.is_seen(f.columns[c]) && f.score[c] < threshold) f.masked[c] = 1;
  }
  return f;
}

void apply_feasibility(ScoreMatrix& scores, const FeasibleSpace& space) {
  if (scores.cols != space.columns.size()) throw ShapeError("feasibility mask does not match score columns");
  for (std::size_t c = 0; c < scores.cols; ++c) {
    if (!space.masked[c]) continue;
    for (std::size_t r = 0; r < scores.rows; ++r) scores.at(r, c) = kMasked;
  }
}

ThresholdChoice choose_threshold(const LabelSpace& space, const nn::Tensor& attr_texts,
                                 const nn::Tensor& obj_texts, const ScoreMatrix& validation,
                                 std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("feasibility threshold grid is empty");
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  bool found = false;
  ThresholdChoice best;
  for (double t : sorted) {
    ScoreMatrix masked = validation;
    apply_feasibility(masked, feasibility_filter(space, attr_texts, obj_texts, t));
    EvalReport report;
    try {
      report = bias_sweep(masked);
    } catch (const ProtocolError&) {
      continue;
    }
    if (!found || report.auc > best.auc) {
      best = {t, report.auc};
      found = true;
    }
  }
  if (!found) throw ProtocolError("every feasibility threshold masks all unseen pairs");
  return best;
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid = {-1.0, -0.5, 0.0};
  for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
  return grid;
}

}  // namespace velocomp::czsl
