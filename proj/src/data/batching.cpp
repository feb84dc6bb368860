// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/data/batching.hpp"

#include <algorithm>

#include "velocomp/error.hpp"
#include "velocomp/rng.hpp"

namespace velocomp::data {

std::vector<std::vector<std::size_t>> make_batches(const EmbeddingDataset& ds, Split split,
                                                   std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  std::vector<std::size_t> order = ds.split_indices(split);
  if (order.empty()) throw ContractError("split '" + std::string(split_name(split)) + "' has no samples");
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

}  // namespace velocomp::data
