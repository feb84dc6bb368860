// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/data/dataset.hpp"

#include <algorithm>
#include <set>

#include "velocomp/error.hpp"

namespace velocomp::data {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train, val or test)");
}

std::span<const double> Sample::feature(Branch b) const {
  switch (b) {
    case Branch::kAttribute:
      if (!attr_feature.empty()) return attr_feature;
      break;
    case Branch::kObject:
      if (!obj_feature.empty()) return obj_feature;
      break;
    case Branch::kComposition:
      break;
  }
  return comp_feature;
}

std::optional<std::size_t> EmbeddingDataset::composition_row(Pair p) const {
  // comp_pairs is short enough at desk scale; a linear scan keeps the type plain.
  for (std::size_t i = 0; i < comp_pairs.size(); ++i) {
    if (comp_pairs[i] == p) return i;
  }
  return std::nullopt;
}

Tensor EmbeddingDataset::composition_texts(std::span<const Pair> pairs) const {
  Tensor out({pairs.size(), dim}, 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto row = composition_row(pairs[k]);
    if (!row) {
      throw DataError("no composition text for pair (" + std::to_string(pairs[k].attr) + ", " +
                      std::to_string(pairs[k].obj) + "); open world needs the full product");
    }
    const auto src = comp_text.row(*row);
    std::copy(src.begin(), src.end(), out.values().begin() + static_cast<std::ptrdiff_t>(k * dim));
  }
  return out;
}

std::vector<std::size_t> EmbeddingDataset::split_indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].split == s) out.push_back(i);
  }
  return out;
}

namespace {

void check_unique_rows(const Tensor& t, const char* what) {
  std::set<std::vector<double>> rows;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto v = t.row_view(r);
    if (!rows.emplace(v.begin(), v.end()).second) {
      throw DataError(std::string(what) + " text row " + std::to_string(r) + " duplicates an earlier row");
    }
  }
}

}  // namespace

void EmbeddingDataset::validate() const {
  if (dim == 0) throw DataError("embedding dim must be positive");
  if (branch_mask != kSinglePath && branch_mask != kMultiPath) {
    throw DataError("branch mask " + std::to_string(branch_mask) + " is neither single-path (4) nor multi-path (7)");
  }
  const std::size_t m = label_space.attribute_count(), n = label_space.object_count();
  if (attr_text.size() != m || obj_text.size() != n) throw DataError("text block sizes do not match M and N");
  if (attr_text.dim() != dim || obj_text.dim() != dim || comp_text.dim() != dim) {
    throw ShapeError("text embeddings must all have width " + std::to_string(dim));
  }
  if (comp_text.size() != comp_pairs.size()) throw DataError("composition text rows do not match the pair order");
  const std::size_t listed = label_space.seen().size() + label_space.unseen().size();
  const bool full = comp_pairs.size() == m * n;
  if (comp_pairs != composition_order(label_space, full) || (!full && comp_pairs.size() != listed)) {
    throw DataError("composition rows must cover seen+unseen pairs or the full product, in canonical order");
  }
  check_unique_rows(attr_text.embeddings(), "attribute");
  check_unique_rows(obj_text.embeddings(), "object");
  check_unique_rows(comp_text.embeddings(), "composition");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const std::string where = "sample " + std::to_string(i);
    if (!label_space.valid(s.pair())) throw DataError(where + " has an out-of-range pair");
    if (!label_space.contains(s.pair())) throw DataError(where + " has a pair outside the label space");
    if (s.split == Split::kTrain && !label_space.is_seen(s.pair())) {
      throw SplitError(where + " is a train sample with unseen pair (" + std::to_string(s.attr) + ", " +
                       std::to_string(s.obj) + ")");
    }
    const bool multi = multi_path();
    auto check = [&](const Vec& f, bool present, const char* name) {
      if (present && f.size() != dim) throw ShapeError(where + " " + name + " feature has the wrong width");
      if (!present && !f.empty()) throw DataError(where + " carries a " + name + " feature the mask omits");
    };
    check(s.attr_feature, multi, "attribute");
    check(s.obj_feature, multi, "object");
    check(s.comp_feature, true, "composition");
  }
}

std::vector<std::string> attribute_labels(std::size_t m) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back("a" + std::to_string(i));
  return out;
}

std::vector<std::string> object_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("o" + std::to_string(i));
  return out;
}

std::vector<std::string> pair_labels(std::span<const Pair> pairs) {
  std::vector<std::string> out;
  for (Pair p : pairs) out.push_back("a" + std::to_string(p.attr) + " o" + std::to_string(p.obj));
  return out;
}

std::vector<Pair> composition_order(const czsl::LabelSpace& space, bool full_product) {
  std::vector<Pair> out(space.seen());
  out.insert(out.end(), space.unseen().begin(), space.unseen().end());
  if (full_product) {
    for (std::uint32_t a = 0; a < space.attribute_count(); ++a) {
      for (std::uint32_t o = 0; o < space.object_count(); ++o) {
        if (!space.contains({a, o})) out.push_back({a, o});
      }
    }
  }
  return out;
}

EmbeddingDataset make_dataset(czsl::LabelSpace space, Tensor attr_text, Tensor obj_text, Tensor comp_text,
                              bool full_product, std::uint8_t branch_mask, std::vector<Sample> samples) {
  EmbeddingDataset ds;
  ds.dim = attr_text.cols();
  ds.comp_pairs = composition_order(space, full_product);
  ds.attr_text = flow::BranchVocabulary(Branch::kAttribute, std::move(attr_text), attribute_labels(space.attribute_count()));
  ds.obj_text = flow::BranchVocabulary(Branch::kObject, std::move(obj_text), object_labels(space.object_count()));
  if (comp_text.rows() != ds.comp_pairs.size()) {
    throw DataError("composition block has " + std::to_string(comp_text.rows()) + " rows, expected " +
                    std::to_string(ds.comp_pairs.size()));
  }
  ds.comp_text = flow::BranchVocabulary(Branch::kComposition, std::move(comp_text), pair_labels(ds.comp_pairs));
  ds.label_space = std::move(space);
  ds.branch_mask = branch_mask;
  ds.samples = std::move(samples);
  ds.validate();
  return ds;
}

}  // namespace velocomp::data
