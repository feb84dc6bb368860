// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/composer_net.hpp"

#include <map>

#include "velocomp/error.hpp"
#include "velocomp/nn/checkpoint.hpp"

namespace velocomp::nn {

ComposerNet::ComposerNet(const ComposerNetConfig& config)
    : config_(config),
      in_proj_("in_proj", 2 * config.dim, config.width),
      head_("head", config.width, 2) {
  if (config.dim == 0 || config.width == 0) throw ConfigError("composer needs dim > 0 and width > 0");
  for (std::size_t i = 0; i < config.blocks; ++i) {
    const std::string p = "blocks." + std::to_string(i);
    blocks_.push_back(Block{Linear(p + ".fc1", config.width, config.width),
                            Linear(p + ".fc2", config.width, config.width)});
  }
}

void ComposerNet::init(Rng& rng) {
  in_proj_.init_fan_in(rng);
  for (Block& b : blocks_) {
    b.fc1.init_fan_in(rng);
    b.fc2.init_fan_in(rng);
  }
  head_.init_fan_in(rng);
}

Var ComposerNet::forward(Graph& g, Var input) {
  const Tensor& x = g.value(input);
  if (x.cols() != 2 * config_.dim) {
    throw ShapeError("composer expects width " + std::to_string(2 * config_.dim) + ", got " +
                     std::to_string(x.cols()));
  }
  Var h = in_proj_.apply(g, input);
  for (Block& b : blocks_) {
    h = g.add(h, b.fc2.apply(g, g.gelu(b.fc1.apply(g, g.layer_norm(h)))));
  }
  return head_.apply(g, g.gelu(g.layer_norm(h)));
}

std::pair<double, double> ComposerNet::coefficients(std::span<const double> delta_a,
                                                    std::span<const double> delta_o) {
  if (delta_a.size() != config_.dim || delta_o.size() != config_.dim) {
    throw ShapeError("composer inputs must both have width " + std::to_string(config_.dim));
  }
  Tensor input({1, 2 * config_.dim}, 0.0);
  for (std::size_t i = 0; i < config_.dim; ++i) {
    input(0, i) = delta_a[i];
    input(0, config_.dim + i) = delta_o[i];
  }
  Graph g;
  const Tensor& out = g.value(forward(g, g.constant(std::move(input))));
  return {out(0, 0), out(0, 1)};
}

ParameterList ComposerNet::parameters() {
  ParameterList out;
  in_proj_.collect(out);
  for (Block& b : blocks_) {
    b.fc1.collect(out);
    b.fc2.collect(out);
  }
  head_.collect(out);
  return out;
}

void ComposerNet::save(const std::filesystem::path& path) { save_checkpoint(path, parameters()); }

ComposerNet ComposerNet::load(const std::filesystem::path& path) {
  const auto tensors = load_checkpoint(path);
  std::map<std::string, const Tensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t.value;
  auto it = by_name.find("in_proj.weight");
  if (it == by_name.end()) throw CheckpointError(path.string() + ": missing parameter in_proj.weight");
  if (it->second->rows() % 2 != 0) throw CheckpointError(path.string() + ": composer input width is odd");
  ComposerNetConfig config;
  config.dim = it->second->rows() / 2;
  config.width = it->second->cols();
  config.blocks = 0;
  while (by_name.count("blocks." + std::to_string(config.blocks) + ".fc1.weight")) ++config.blocks;
  ComposerNet net(config);
  assign_parameters(net.parameters(), tensors);
  return net;
}

}  // namespace velocomp::nn
