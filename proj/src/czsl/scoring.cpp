// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/czsl/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "velocomp/composer.hpp"
#include "velocomp/error.hpp"

namespace velocomp::czsl {

Vec cosine_scores(std::span<const double> query, const Tensor& candidates, double tau) {
  if (!(tau > 0.0)) throw ConfigError("temperature must be positive");
  if (query.size() != candidates.cols()) throw ShapeError("query width does not match candidates");
  const Vec q = nn::normalized(query);
  Vec out(candidates.rows());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Vec c = nn::normalized(candidates.row_view(k));
    out[k] = nn::dot(q, c) / tau;
  }
  return out;
}

Vec softmax(std::span<const double> logits) {
  if (logits.empty()) return {};
  const double peak = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

Vec troika_fusion(std::span<const double> p_c, std::span<const double> p_a,
                  std::span<const double> p_o, std::span<const Pair> pairs) {
  if (p_c.size() != pairs.size()) throw ShapeError("p_c must have one entry per pair");
  auto check = [](std::span<const double> p, const char* what) {
    for (double v : p) {
      if (!(v >= 0.0)) throw ContractError(std::string(what) + " contains a negative probability");
    }
  };
  check(p_c, "p_c");
  check(p_a, "p_a");
  check(p_o, "p_o");
  Vec out(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (pairs[k].attr >= p_a.size() || pairs[k].obj >= p_o.size()) {
      throw ShapeError("pair indexes outside the primitive distributions");
    }
    out[k] = p_c[k] + p_a[pairs[k].attr] * p_o[pairs[k].obj];
  }
  return out;
}

namespace {

void check_scorer(const FlowScorer& s) {
  if (!s.attr_flow || !s.obj_flow || !s.composer || !s.attr_vocab || !s.obj_vocab) {
    throw ContractError("flow scorer is missing a network or vocabulary");
  }
  if (s.candidate_texts.rows() != s.candidates.size()) {
    throw ShapeError("one candidate text row per candidate pair required");
  }
  if (!(s.h > 0.0)) throw ConfigError("composition step size h must be positive");
}

Vec row_of(const Tensor& t, std::size_t r) {
  const auto v = t.row_view(r);
  return Vec(v.begin(), v.end());
}

// Scores rows [begin, end) of the batch into out.
void score_range(FlowScorer& s, const Tensor& attr, const Tensor& obj, const Tensor& comp,
                 std::size_t begin, std::size_t end, std::vector<Vec>& out) {
  if (begin >= end) return;
  const std::size_t dim = attr.cols();
  auto slice = [&](const Tensor& t) {
    Tensor part({end - begin, dim}, 0.0);
    std::copy(t.values().begin() + static_cast<std::ptrdiff_t>(begin * dim),
              t.values().begin() + static_cast<std::ptrdiff_t>(end * dim), part.values().begin());
    return part;
  };
  const Tensor xa = slice(attr), xo = slice(obj), xc = slice(comp);
  const std::vector<double> zeros(end - begin, 0.0);
  const Tensor va = s.attr_flow->forward(xa, zeros);
  const Tensor vo = s.obj_flow->forward(xo, zeros);
  for (std::size_t r = 0; r < end - begin; ++r) {
    Vec end_a = row_of(xa, r), end_o = row_of(xo, r);
    for (std::size_t i = 0; i < dim; ++i) {
      end_a[i] += va(r, i);
      end_o[i] += vo(r, i);
    }
    const auto composed = composer::compose_velocity(*s.composer, va.row_view(r), vo.row_view(r));
    const Vec end_c = composer::compose_transport(xc.row_view(r), composed.velocity, s.h);

    const Vec p_c = softmax(cosine_scores(end_c, s.candidate_texts, s.tau));
    if (!s.multi_path) {
      out[begin + r] = p_c;
      continue;
    }
    const Vec p_a = softmax(cosine_scores(end_a, s.attr_vocab->embeddings(), s.tau));
    const Vec p_o = softmax(cosine_scores(end_o, s.obj_vocab->embeddings(), s.tau));
    out[begin + r] = troika_fusion(p_c, p_a, p_o, s.candidates);
  }
}

}  // namespace

Endpoints transport_endpoints(FlowScorer& s, const BranchFeatures& f) {
  check_scorer(s);
  if (f.attr.empty() || f.obj.empty() || f.comp.empty()) {
    throw ContractError("all branch features are required for transport");
  }
  Endpoints e;
  e.attr = flow::one_step_transport(*s.attr_flow, f.attr);
  e.obj = flow::one_step_transport(*s.obj_flow, f.obj);
  const Vec va = s.attr_flow->velocity(f.attr, 0.0);
  const Vec vo = s.obj_flow->velocity(f.obj, 0.0);
  const auto composed = composer::compose_velocity(*s.composer, va, vo);
  e.comp = composer::compose_transport(f.comp, composed.velocity, s.h);
  return e;
}

Vec flow_pair_scores(FlowScorer& s, const BranchFeatures& f) {
  if (f.attr.empty() || f.obj.empty() || f.comp.empty()) {
    throw ContractError(s.multi_path ? "multi-path scoring needs attribute, object and composition features"
                                     : "scoring needs a visual feature");
  }
  const auto batch = flow_pair_scores_batch(s, Tensor::row(f.attr), Tensor::row(f.obj), Tensor::row(f.comp));
  return batch.front();
}

std::vector<Vec> flow_pair_scores_batch(FlowScorer& s, const Tensor& attr, const Tensor& obj,
                                        const Tensor& comp, std::size_t threads) {
  check_scorer(s);
  if (!attr.same_shape(obj) || !attr.same_shape(comp)) throw ShapeError("branch feature batches differ in shape");
  const std::size_t rows = attr.rows();
  std::vector<Vec> out(rows);
  threads = std::max<std::size_t>(1, std::min(threads, rows));
  if (threads == 1) {
    score_range(s, attr, obj, comp, 0, rows, out);
    return out;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (rows + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk, end = std::min(rows, begin + chunk);
    workers.emplace_back([&, begin, end] { score_range(s, attr, obj, comp, begin, end, out); });
  }
  for (auto& w : workers) w.join();
  return out;
}

}  // namespace velocomp::czsl
