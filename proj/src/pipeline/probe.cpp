// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/pipeline/probe.hpp"

#include "velocomp/error.hpp"

namespace velocomp::pipeline {

std::vector<leakage::ProbeCell> probe_dataset(const data::EmbeddingDataset& ds) {
  if (!ds.multi_path()) throw ProtocolError("the leakage probe needs a multi-path dataset");
  const std::vector<flow::Branch> branches = {flow::Branch::kAttribute, flow::Branch::kObject,
                                              flow::Branch::kComposition};
  std::vector<std::vector<leakage::LabeledFeature>> features(branches.size());
  for (const data::Sample& s : ds.samples) {
    for (std::size_t b = 0; b < branches.size(); ++b) {
      const auto f = s.feature(branches[b]);
      features[b].push_back({nn::Vec(f.begin(), f.end()), s.attr, s.obj});
    }
  }
  return leakage::leakage_probe(features, branches, ds.attr_text, ds.obj_text);
}

}  // namespace velocomp::pipeline
