// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/velocity_net.hpp"

#include <map>

#include "velocomp/error.hpp"
#include "velocomp/nn/checkpoint.hpp"

namespace velocomp::nn {

VelocityNet::VelocityNet(const VelocityNetConfig& config)
    : config_(config),
      embedder_(config.frequencies, config.width),
      in_proj_("in_proj", config.dim, config.width),
      head_("head", config.width, config.dim) {
  if (config.dim == 0 || config.width == 0) throw ConfigError("velocity net needs dim > 0 and width > 0");
  const std::size_t w = config.width;
  blocks_.reserve(config.blocks);
  for (std::size_t i = 0; i < config.blocks; ++i) {
    const std::string p = "blocks." + std::to_string(i);
    blocks_.push_back(Block{Linear(p + ".ada", w, 3 * w), Linear(p + ".fc1", w, w),
                            Linear(p + ".fc2", w, w)});
  }
}

void VelocityNet::init(Rng& rng) {
  embedder_.init(rng);
  in_proj_.init_fan_in(rng);
  for (Block& b : blocks_) {
    b.ada.init_fan_in(rng);
    b.fc1.init_fan_in(rng);
    b.fc2.init_fan_in(rng);
  }
  zero_gates();
  head_.weight.value.fill(0.0);
  head_.bias.value.fill(0.0);
}

void VelocityNet::zero_gates() {
  const std::size_t w = config_.width;
  for (Block& b : blocks_) {
    Tensor& wt = b.ada.weight.value;
    for (std::size_t r = 0; r < wt.rows(); ++r)
      for (std::size_t c = 2 * w; c < 3 * w; ++c) wt(r, c) = 0.0;
    for (std::size_t c = 2 * w; c < 3 * w; ++c) b.ada.bias.value(0, c) = 0.0;
  }
}

Var VelocityNet::forward(Graph& g, Var x, std::span<const double> times) {
  const Tensor& xv = g.value(x);
  if (xv.cols() != config_.dim) {
    throw ShapeError("velocity net expects width " + std::to_string(config_.dim) + ", got " +
                     std::to_string(xv.cols()));
  }
  if (xv.rows() != times.size()) throw ShapeError("velocity net: one time per row required");
  const std::size_t w = config_.width;
  Var cond = g.silu(embedder_.apply(g, times));
  Var h = in_proj_.apply(g, x);
  for (Block& b : blocks_) {
    Var mod = b.ada.apply(g, cond);
    Var shift = g.slice_cols(mod, 0, w);
    Var scale = g.slice_cols(mod, w, 2 * w);
    Var gate = g.slice_cols(mod, 2 * w, 3 * w);
    Var modulated = g.add(g.mul(g.layer_norm(h), g.add_scalar(scale, 1.0)), shift);
    Var y = b.fc2.apply(g, g.silu(b.fc1.apply(g, modulated)));
    h = g.add(h, g.mul(gate, y));
  }
  return head_.apply(g, g.layer_norm(h));
}

Tensor VelocityNet::forward(const Tensor& x, std::span<const double> times) {
  Graph g;
  return g.value(forward(g, g.constant(x), times));
}

Vec VelocityNet::velocity(std::span<const double> x, double t) {
  const double times[] = {t};
  Tensor out = forward(Tensor::row(x), times);
  return Vec(out.values().begin(), out.values().end());
}

ParameterList VelocityNet::parameters() {
  ParameterList out;
  embedder_.collect(out);
  in_proj_.collect(out);
  for (Block& b : blocks_) {
    b.ada.collect(out);
    b.fc1.collect(out);
    b.fc2.collect(out);
  }
  head_.collect(out);
  return out;
}

void VelocityNet::save(const std::filesystem::path& path) { save_checkpoint(path, parameters()); }

VelocityNet VelocityNet::load(const std::filesystem::path& path) {
  const auto tensors = load_checkpoint(path);
  std::map<std::string, const Tensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t.value;
  auto shape_of = [&](const std::string& name) -> const Tensor& {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw CheckpointError(path.string() + ": missing parameter " + name);
    return *it->second;
  };
  VelocityNetConfig config;
  const Tensor& proj = shape_of("in_proj.weight");
  config.dim = proj.rows();
  config.width = proj.cols();
  config.frequencies = shape_of("temb.fc1.weight").rows() / 2;
  config.blocks = 0;
  while (by_name.count("blocks." + std::to_string(config.blocks) + ".ada.weight")) ++config.blocks;
  VelocityNet net(config);
  assign_parameters(net.parameters(), tensors);
  return net;
}

}  // namespace velocomp::nn
