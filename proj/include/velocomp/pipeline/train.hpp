// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "velocomp/data/dataset.hpp"
#include "velocomp/nn/composer_net.hpp"
#include "velocomp/nn/velocity_net.hpp"
#include "velocomp/pipeline/config.hpp"

namespace velocomp::pipeline {

struct Models {
  nn::VelocityNet attr_flow;
  nn::VelocityNet obj_flow;
  nn::ComposerNet composer;
};

struct EpochLoss {
  std::size_t epoch = 0;  // 1-based within its stage
  int stage = 1;          // 1 flows, 2 composer
  double loss = 0.0;
};

using Logger = std::function<void(const std::string&)>;

// Freshly initialized networks; seeded from config.seed.
Models init_models(std::size_t dim, const RunConfig& config);

// Stage 1 trains both primitive flows on the flow-matching loss plus
// alpha times the leakage loss (multi-path only). Stage 2 freezes the flows
// and fits the composer to least-squares coefficient targets. With
// config.joint the two stages alternate within every epoch instead.
struct TrainResult {
  Models models;
  std::vector<EpochLoss> losses;
  bool leakage_enabled = false;
};
TrainResult train(const data::EmbeddingDataset& ds, const RunConfig& config, const Logger& log = {});

// "epoch=<n> stage=<s> loss=<v>"
std::string format_epoch(const EpochLoss& e);

inline constexpr const char* kAttrCheckpoint = "attr_flow.fcnn";
inline constexpr const char* kObjCheckpoint = "obj_flow.fcnn";
inline constexpr const char* kComposerCheckpoint = "composer.fcnn";

void save_models(Models& models, const std::filesystem::path& dir);
// Throws CheckpointError when a network's width differs from `dim`.
Models load_models(const std::filesystem::path& dir, std::size_t dim);

}  // namespace velocomp::pipeline
