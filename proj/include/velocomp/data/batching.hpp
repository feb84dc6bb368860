// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "velocomp/data/dataset.hpp"

namespace velocomp::data {

// Sample indices of `split`, permuted by `seed` and cut into batches; the last
// batch keeps the remainder. Throws ContractError on an empty split.
std::vector<std::vector<std::size_t>> make_batches(const EmbeddingDataset& ds, Split split,
                                                   std::size_t batch_size, std::uint64_t seed);

}  // namespace velocomp::data
