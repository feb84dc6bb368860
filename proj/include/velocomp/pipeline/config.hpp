// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "velocomp/czsl/label_space.hpp"
#include "velocomp/data/dataset.hpp"
#include "velocomp/data/synthetic.hpp"
#include "velocomp/nn/composer_net.hpp"
#include "velocomp/nn/optimizer.hpp"
#include "velocomp/nn/velocity_net.hpp"

namespace velocomp::pipeline {

struct RunConfig {
  // Empty means: generate from `synthetic`.
  std::filesystem::path dataset;
  data::SyntheticConfig synthetic;

  std::size_t flow_width = 64;
  std::size_t flow_blocks = 4;
  std::size_t flow_frequencies = 16;
  std::size_t composer_width = 64;
  std::size_t composer_blocks = 2;

  nn::AdamWConfig optimizer;
  std::size_t flow_epochs = 50;
  std::size_t composer_epochs = 50;
  std::size_t batch_size = 32;
  bool joint = false;

  double tau = 0.01;
  double ce_weight = 1.0;
  double h = 0.1;
  double alpha = 1.0;

  czsl::Protocol protocol = czsl::Protocol::kClosed;
  std::vector<double> thresholds;
  data::Split eval_split = data::Split::kTest;

  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::size_t threads = 1;

  RunConfig();

  // Throws ConfigError on any invariant violation. Only checks the dataset
  // path when `need_dataset` is set.
  void validate(bool need_dataset = false) const;

  nn::VelocityNetConfig flow_config(std::size_t dim) const;
  nn::ComposerNetConfig composer_config(std::size_t dim) const;
};

// key=value lines, '#' starts a comment, blank lines ignored. Later keys win.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

// Applies one setting; unknown keys and malformed values raise ConfigError.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
void apply_settings(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& settings);
RunConfig load_config(const std::filesystem::path& path);

// Every recognized key with its current value, one per line.
std::string dump_config(const RunConfig& config);

}  // namespace velocomp::pipeline
