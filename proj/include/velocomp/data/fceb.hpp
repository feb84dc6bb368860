// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "velocomp/data/dataset.hpp"

namespace velocomp::data {

inline constexpr std::uint32_t kDatasetVersion = 1;

// Little-endian layout:
//   "FCEB" | version | D | M | N | K_c
//   seen count | seen pairs (attr, obj) | unseen count | unseen pairs
//   branch mask u8
//   f32 text rows: M attribute, N object, K_c composition
//   sample count | per sample: attr, obj, split u8, f32 feature per present
//   branch in attribute, object, composition order
std::string encode_dataset(const EmbeddingDataset& ds);
EmbeddingDataset decode_dataset(std::string_view bytes, const std::string& context = "dataset");

void save_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path);
EmbeddingDataset load_dataset(const std::filesystem::path& path);

// Byte length implied by the header fields.
std::size_t encoded_size(std::size_t dim, std::size_t m, std::size_t n, std::size_t comp_rows,
                         std::size_t seen, std::size_t unseen, std::uint8_t branch_mask, std::size_t samples);

}  // namespace velocomp::data
