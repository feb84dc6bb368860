// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/pipeline/train.hpp"

#include <cstdio>

#include "velocomp/composer.hpp"
#include "velocomp/data/batching.hpp"
#include "velocomp/error.hpp"
#include "velocomp/flow.hpp"
#include "velocomp/leakage.hpp"
#include "velocomp/nn/optimizer.hpp"
#include "velocomp/rng.hpp"

namespace velocomp::pipeline {
namespace {

using data::Sample;
using flow::Branch;
using nn::Tensor;

Tensor gather_features(const data::EmbeddingDataset& ds, const std::vector<std::size_t>& idx, Branch b) {
  Tensor out({idx.size(), ds.dim}, 0.0);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto f = ds.samples[idx[r]].feature(b);
    std::copy(f.begin(), f.end(), out.row_view(r).begin());
  }
  return out;
}

Tensor gather_texts(const data::EmbeddingDataset& ds, const std::vector<std::size_t>& idx, Branch b) {
  Tensor out({idx.size(), ds.dim}, 0.0);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const Sample& s = ds.samples[idx[r]];
    std::span<const double> row;
    if (b == Branch::kAttribute) {
      row = ds.attr_text.row(s.attr);
    } else if (b == Branch::kObject) {
      row = ds.obj_text.row(s.obj);
    } else {
      const auto k = ds.composition_row(s.pair());
      if (!k) throw DataError("training pair has no composition text");
      row = ds.comp_text.row(*k);
    }
    std::copy(row.begin(), row.end(), out.row_view(r).begin());
  }
  return out;
}

std::vector<double> draw_times(std::size_t n, Rng& rng) {
  std::vector<double> t(n);
  for (double& x : t) x = rng.uniform_closed();
  return t;
}

// Per-batch seeds derive from the run seed and the epoch so batch order does
// not depend on how many random draws earlier epochs consumed.
std::uint64_t epoch_seed(std::uint64_t seed, int stage, std::size_t epoch) {
  return seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(stage) * 0x100000001b3ULL + epoch;
}

struct FlowStage {
  nn::VelocityNet& net;
  nn::AdamW opt;
  Branch branch;
  Branch other;
  const flow::BranchVocabulary& vocab;
};

double flow_step(FlowStage& st, const data::EmbeddingDataset& ds, const std::vector<std::size_t>& idx,
                 const RunConfig& config, bool leak, Rng& rng) {
  const flow::FlowLossConfig loss_cfg{config.tau, config.ce_weight};
  const Tensor x1 = gather_texts(ds, idx, st.branch);
  nn::Graph g;
  nn::Var loss =
      flow::fm_loss_graph(g, st.net, gather_features(ds, idx, st.branch), x1, draw_times(idx.size(), rng), st.vocab,
                          loss_cfg)
          .total;
  if (leak) {
    const std::vector<leakage::SourceBatch> sources = {
        {st.other, gather_features(ds, idx, st.other), x1},
        {Branch::kComposition, gather_features(ds, idx, Branch::kComposition), x1},
    };
    const std::vector<std::vector<double>> times = {draw_times(idx.size(), rng), draw_times(idx.size(), rng)};
    nn::Var l = leakage::leakage_loss_graph(g, st.net, sources, times, st.vocab, loss_cfg);
    loss = g.add(loss, g.scale(l, config.alpha));
  }
  const double value = g.value(loss).item();
  g.backward(loss);
  st.opt.step();
  return value;
}

double composer_step(Models& m, nn::AdamW& opt, const data::EmbeddingDataset& ds,
                     const std::vector<std::size_t>& idx, Rng& rng) {
  const std::vector<double> times = draw_times(idx.size(), rng);
  auto velocities = [&](nn::VelocityNet& net, Branch b) {
    const Tensor x0 = gather_features(ds, idx, b);
    const Tensor x1 = gather_texts(ds, idx, b);
    Tensor xt = x0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < ds.dim; ++c) xt(r, c) = (1.0 - times[r]) * x0(r, c) + times[r] * x1(r, c);
    }
    return net.forward(xt, times);
  };
  const Tensor va = velocities(m.attr_flow, Branch::kAttribute);
  const Tensor vo = velocities(m.obj_flow, Branch::kObject);
  const Tensor x0c = gather_features(ds, idx, Branch::kComposition);
  const Tensor x1c = gather_texts(ds, idx, Branch::kComposition);
  std::vector<composer::CompositionSample> batch(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto row = [&](const Tensor& t) {
      const auto v = t.row_view(r);
      return nn::Vec(v.begin(), v.end());
    };
    batch[r] = {row(va), row(vo), row(x0c), row(x1c)};
  }
  const auto targets = composer::coefficient_targets(batch);
  nn::Graph g;
  nn::Var loss = composer::composer_loss_graph(g, m.composer, composer::direction_batch(batch), targets);
  const double value = g.value(loss).item();
  g.backward(loss);
  opt.step();
  return value;
}

}  // namespace

Models init_models(std::size_t dim, const RunConfig& config) {
  Rng rng(config.seed);
  Rng attr_rng = rng.split(), obj_rng = rng.split(), comp_rng = rng.split();
  Models m{nn::VelocityNet(config.flow_config(dim)), nn::VelocityNet(config.flow_config(dim)),
           nn::ComposerNet(config.composer_config(dim))};
  m.attr_flow.init(attr_rng);
  m.obj_flow.init(obj_rng);
  m.composer.init(comp_rng);
  return m;
}

std::string format_epoch(const EpochLoss& e) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "epoch=%zu stage=%d loss=%.17g", e.epoch, e.stage, e.loss);
  return buf;
}

TrainResult train(const data::EmbeddingDataset& ds, const RunConfig& config, const Logger& log) {
  config.validate();
  if (ds.split_indices(data::Split::kTrain).empty()) throw DataError("dataset has no train samples");
  TrainResult result;
  result.models = init_models(ds.dim, config);
  Models& m = result.models;
  result.leakage_enabled = ds.multi_path() && config.alpha > 0.0;
  if (!ds.multi_path() && config.alpha > 0.0 && log) {
    log("warning: single-path dataset, leakage losses disabled");
  }

  FlowStage attr{m.attr_flow, nn::AdamW(m.attr_flow.parameters(), config.optimizer), Branch::kAttribute,
                 Branch::kObject, ds.attr_text};
  FlowStage obj{m.obj_flow, nn::AdamW(m.obj_flow.parameters(), config.optimizer), Branch::kObject,
                Branch::kAttribute, ds.obj_text};
  nn::AdamW comp_opt(m.composer.parameters(), config.optimizer);
  Rng time_rng = Rng(config.seed).split().split();

  auto record = [&](int stage, std::size_t epoch, double total, std::size_t batches) {
    EpochLoss e{epoch, stage, total / static_cast<double>(batches)};
    result.losses.push_back(e);
    if (log) log(format_epoch(e));
  };
  auto flow_epoch = [&](std::size_t epoch) {
    const auto batches = data::make_batches(ds, data::Split::kTrain, config.batch_size, epoch_seed(config.seed, 1, epoch));
    double total = 0.0;
    for (const auto& idx : batches) {
      total += flow_step(attr, ds, idx, config, result.leakage_enabled, time_rng);
      total += flow_step(obj, ds, idx, config, result.leakage_enabled, time_rng);
    }
    record(1, epoch, total, batches.size());
  };
  auto composer_epoch = [&](std::size_t epoch) {
    const auto batches = data::make_batches(ds, data::Split::kTrain, config.batch_size, epoch_seed(config.seed, 2, epoch));
    double total = 0.0;
    for (const auto& idx : batches) total += composer_step(m, comp_opt, ds, idx, time_rng);
    record(2, epoch, total, batches.size());
  };

  if (config.joint) {
    const std::size_t epochs = std::max(config.flow_epochs, config.composer_epochs);
    for (std::size_t e = 1; e <= epochs; ++e) {
      if (e <= config.flow_epochs) flow_epoch(e);
      if (e <= config.composer_epochs) composer_epoch(e);
    }
  } else {
    for (std::size_t e = 1; e <= config.flow_epochs; ++e) flow_epoch(e);
    for (std::size_t e = 1; e <= config.composer_epochs; ++e) composer_epoch(e);
  }
  return result;
}

void save_models(Models& models, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  models.attr_flow.save(dir / kAttrCheckpoint);
  models.obj_flow.save(dir / kObjCheckpoint);
  models.composer.save(dir / kComposerCheckpoint);
}

Models load_models(const std::filesystem::path& dir, std::size_t dim) {
  Models m{nn::VelocityNet::load(dir / kAttrCheckpoint), nn::VelocityNet::load(dir / kObjCheckpoint),
           nn::ComposerNet::load(dir / kComposerCheckpoint)};
  auto check = [&](std::size_t got, const char* name) {
    if (got != dim) {
      throw CheckpointError(std::string(name) + " expects dim " + std::to_string(got) + " but the dataset has dim " +
                            std::to_string(dim));
    }
  };
  check(m.attr_flow.dim(), kAttrCheckpoint);
  check(m.obj_flow.dim(), kObjCheckpoint);
  check(m.composer.dim(), kComposerCheckpoint);
  return m;
}

}  // namespace velocomp::pipeline
