// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>

#include "velocomp/czsl/metrics.hpp"
#include "velocomp/czsl/scoring.hpp"
#include "velocomp/data/dataset.hpp"
#include "velocomp/pipeline/train.hpp"

namespace velocomp::pipeline {

// Score matrix of `split` against the protocol's candidate pairs. Column k is
// label_space.test_pairs(protocol)[k]. Throws ProtocolError for the train split.
czsl::ScoreMatrix score_split(const data::EmbeddingDataset& ds, Models& models, const RunConfig& config,
                              czsl::Protocol protocol, data::Split split);

struct EvalOutputs {
  czsl::EvalReport closed;
  czsl::ScoreMatrix closed_scores;
  std::optional<czsl::EvalReport> open;
  std::optional<czsl::ScoreMatrix> open_scores;  // after feasibility masking
  double threshold = 0.0;
  std::size_t masked_pairs = 0;
};

// Closed world always; open world with a validation-chosen feasibility
// threshold when config.protocol is open.
EvalOutputs evaluate(const data::EmbeddingDataset& ds, Models& models, const RunConfig& config);

// report_closed.txt / report_closed.kv / scores_closed.fcsm and the open
// counterparts when present.
void write_eval(const EvalOutputs& outputs, const std::filesystem::path& dir);

}  // namespace velocomp::pipeline
