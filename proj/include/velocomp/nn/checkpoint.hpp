// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "velocomp/nn/graph.hpp"

namespace velocomp::nn {

// "FCNN" checkpoint layout, little-endian:
//   magic "FCNN" | version u32 | repeated until EOF:
//     name_len u32 | name bytes | rank u32 | dims u32 x rank | f64 x prod(dims)
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;
};

void save_checkpoint(const std::filesystem::path& path, const ParameterList& params);
std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

std::string encode_checkpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> decode_checkpoint(const std::string& bytes);

// Copies values by name; every parameter must be present with the same shape.
void assign_parameters(const ParameterList& params, const std::vector<NamedTensor>& tensors);

}  // namespace velocomp::nn
