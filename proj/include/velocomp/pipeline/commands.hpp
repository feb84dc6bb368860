// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "velocomp/data/dataset.hpp"
#include "velocomp/pipeline/config.hpp"
#include "velocomp/pipeline/evaluate.hpp"
#include "velocomp/pipeline/train.hpp"

namespace velocomp::pipeline {

// Dataset named by the config, or the synthetic one it describes.
data::EmbeddingDataset resolve_dataset(const RunConfig& config);

std::string dataset_summary(const data::EmbeddingDataset& ds);

// Each command validates the whole config before touching the filesystem and
// writes only under config.out (or the explicit output path).
data::EmbeddingDataset cmd_synth(const RunConfig& config, const std::filesystem::path& output, const Logger& log = {});
TrainResult cmd_train(const RunConfig& config, const Logger& log = {});
EvalOutputs cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoints, const Logger& log = {});
std::string cmd_probe(const RunConfig& config, const Logger& log = {});

}  // namespace velocomp::pipeline
