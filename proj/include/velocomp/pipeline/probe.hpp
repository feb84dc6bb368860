// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "velocomp/data/dataset.hpp"
#include "velocomp/leakage.hpp"

namespace velocomp::pipeline {

// Cosine probe of every raw visual branch against attribute and object texts,
// over all samples. Throws ProtocolError on a single-path dataset.
std::vector<leakage::ProbeCell> probe_dataset(const data::EmbeddingDataset& ds);

}  // namespace velocomp::pipeline
