// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/pipeline/evaluate.hpp"

#include <algorithm>
#include <cstdio>

#include "velocomp/binary_io.hpp"
#include "velocomp/czsl/feasibility.hpp"
#include "velocomp/czsl/io.hpp"
#include "velocomp/error.hpp"

namespace velocomp::pipeline {

czsl::ScoreMatrix score_split(const data::EmbeddingDataset& ds, Models& models, const RunConfig& config,
                              czsl::Protocol protocol, data::Split split) {
  if (split == data::Split::kTrain) throw ProtocolError("evaluation on the train split is not allowed");
  const std::vector<std::size_t> rows = ds.split_indices(split);
  czsl::FlowScorer scorer;
  scorer.attr_flow = &models.attr_flow;
  scorer.obj_flow = &models.obj_flow;
  scorer.composer = &models.composer;
  scorer.attr_vocab = &ds.attr_text;
  scorer.obj_vocab = &ds.obj_text;
  scorer.candidates = ds.label_space.test_pairs(protocol);
  scorer.candidate_texts = ds.composition_texts(scorer.candidates);
  scorer.h = config.h;
  scorer.tau = config.tau;
  scorer.multi_path = ds.multi_path();

  const auto& cands = scorer.candidates;
  czsl::ScoreMatrix m(rows.size(), cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) m.seen_mask[c] = ds.label_space.is_seen(cands[c]) ? 1 : 0;
  nn::Tensor xa({rows.size(), ds.dim}, 0.0), xo = xa, xc = xa;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const data::Sample& s = ds.samples[rows[r]];
    const auto it = std::find(cands.begin(), cands.end(), s.pair());
    if (it == cands.end()) throw DataError("sample pair is not a candidate of the protocol");
    m.truth[r] = static_cast<std::uint32_t>(it - cands.begin());
    auto put = [&](nn::Tensor& t, flow::Branch b) {
      const auto f = s.feature(b);
      std::copy(f.begin(), f.end(), t.row_view(r).begin());
    };
    put(xa, flow::Branch::kAttribute);
    put(xo, flow::Branch::kObject);
    put(xc, flow::Branch::kComposition);
  }
  if (rows.empty()) return m;
  const auto scored = czsl::flow_pair_scores_batch(scorer, xa, xo, xc, config.threads);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(scored[r].begin(), scored[r].end(), m.scores.begin() + static_cast<std::ptrdiff_t>(r * m.cols));
  }
  return m;
}

EvalOutputs evaluate(const data::EmbeddingDataset& ds, Models& models, const RunConfig& config) {
  EvalOutputs out;
  out.closed_scores = score_split(ds, models, config, czsl::Protocol::kClosed, config.eval_split);
  out.closed = czsl::bias_sweep(out.closed_scores);
  if (config.protocol == czsl::Protocol::kOpen) {
    const auto validation = score_split(ds, models, config, czsl::Protocol::kOpen, data::Split::kVal);
    const auto choice = czsl::choose_threshold(ds.label_space, ds.attr_text.embeddings(), ds.obj_text.embeddings(),
                                               validation, config.thresholds);
    const auto space =
        czsl::feasibility_filter(ds.label_space, ds.attr_text.embeddings(), ds.obj_text.embeddings(), choice.threshold);
    auto scores = score_split(ds, models, config, czsl::Protocol::kOpen, config.eval_split);
    czsl::apply_feasibility(scores, space);
    out.open = czsl::bias_sweep(scores);
    out.open_scores = std::move(scores);
    out.threshold = choice.threshold;
    out.masked_pairs = space.masked_count();
  }
  return out;
}

void write_eval(const EvalOutputs& outputs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_file(dir / "report_closed.kv", czsl::report_key_values(outputs.closed));
  io::write_file(dir / "report_closed.txt", czsl::report_table(outputs.closed, "closed world"));
  czsl::save_score_matrix(outputs.closed_scores, dir / "scores_closed.fcsm");
  if (outputs.open) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "open world (threshold %.17g, %zu pairs masked)", outputs.threshold,
                  outputs.masked_pairs);
    io::write_file(dir / "report_open.kv", czsl::report_key_values(*outputs.open));
    io::write_file(dir / "report_open.txt", czsl::report_table(*outputs.open, buf));
    czsl::save_score_matrix(*outputs.open_scores, dir / "scores_open.fcsm");
  }
}

}  // namespace velocomp::pipeline
