// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "velocomp/czsl/label_space.hpp"
#include "velocomp/flow.hpp"

namespace velocomp::data {

using czsl::Pair;
using flow::Branch;
using nn::Tensor;
using nn::Vec;

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

std::string_view split_name(Split s);
Split parse_split(std::string_view name);

// Branch-presence bits as stored on disk.
inline constexpr std::uint8_t kAttrBit = 1;
inline constexpr std::uint8_t kObjBit = 2;
inline constexpr std::uint8_t kCompBit = 4;
inline constexpr std::uint8_t kSinglePath = kCompBit;
inline constexpr std::uint8_t kMultiPath = kAttrBit | kObjBit | kCompBit;

struct Sample {
  std::uint32_t attr = 0;
  std::uint32_t obj = 0;
  Split split = Split::kTrain;
  // Absent branches are empty. Single-path samples only carry `comp`.
  Vec attr_feature;
  Vec obj_feature;
  Vec comp_feature;

  Pair pair() const { return {attr, obj}; }
  // Feature fed to the given branch: single-path samples use the one visual
  // feature for every branch.
  std::span<const double> feature(Branch b) const;
};

struct EmbeddingDataset {
  std::size_t dim = 0;
  czsl::LabelSpace label_space;
  flow::BranchVocabulary attr_text;
  flow::BranchVocabulary obj_text;
  // Rows follow `comp_pairs`: seen pairs, unseen pairs, then (if present) the
  // remaining product pairs in row-major order.
  flow::BranchVocabulary comp_text;
  std::vector<Pair> comp_pairs;
  std::uint8_t branch_mask = kMultiPath;
  std::vector<Sample> samples;

  bool multi_path() const { return branch_mask == kMultiPath; }
  // Index of a pair's composition text row; nullopt if the file lacks it.
  std::optional<std::size_t> composition_row(Pair p) const;
  // Composition text rows for the given candidate pairs; DataError if any is
  // missing (open world needs the full product).
  Tensor composition_texts(std::span<const Pair> pairs) const;
  std::vector<std::size_t> split_indices(Split s) const;

  // Checks every invariant; throws DataError, SplitError or ShapeError.
  void validate() const;
};

// Synthesized labels ("a3", "o1", "a3 o1"); the file format carries no strings.
std::vector<std::string> attribute_labels(std::size_t m);
std::vector<std::string> object_labels(std::size_t n);
std::vector<std::string> pair_labels(std::span<const Pair> pairs);

// Canonical composition row order for a label space: seen, unseen, and with
// `full_product` the remaining pairs row-major.
std::vector<Pair> composition_order(const czsl::LabelSpace& space, bool full_product);

// Builds a dataset from raw blocks and validates it.
EmbeddingDataset make_dataset(czsl::LabelSpace space, Tensor attr_text, Tensor obj_text, Tensor comp_text,
                              bool full_product, std::uint8_t branch_mask, std::vector<Sample> samples);

}  // namespace velocomp::data
