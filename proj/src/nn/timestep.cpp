// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/timestep.hpp"

#include <cmath>

#include "velocomp/error.hpp"

namespace velocomp::nn {

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("flow time must lie in [0, 1], got " + std::to_string(t));
  }
}

TimestepEmbedder::TimestepEmbedder(std::size_t frequency_count, std::size_t width)
    : fc1_("temb.fc1", 2 * frequency_count, width), fc2_("temb.fc2", width, width) {
  if (frequency_count == 0) throw ConfigError("timestep embedder needs at least one frequency");
  frequencies_.resize(frequency_count);
  const double top = std::log(1000.0);
  for (std::size_t k = 0; k < frequency_count; ++k) {
    const double frac =
        frequency_count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(frequency_count - 1);
    frequencies_[k] = std::exp(frac * top);
  }
}

void TimestepEmbedder::init(Rng& rng) {
  fc1_.init_fan_in(rng);
  fc2_.init_fan_in(rng);
}

Tensor TimestepEmbedder::features(std::span<const double> times) const {
  const std::size_t f = frequencies_.size();
  Tensor out({times.size(), 2 * f}, 0.0);
  for (std::size_t r = 0; r < times.size(); ++r) {
    check_time(times[r]);
    for (std::size_t k = 0; k < f; ++k) {
      out(r, k) = std::cos(frequencies_[k] * times[r]);
      out(r, f + k) = std::sin(frequencies_[k] * times[r]);
    }
  }
  return out;
}

Var TimestepEmbedder::apply(Graph& g, std::span<const double> times) {
  Var x = g.constant(features(times));
  return fc2_.apply(g, g.silu(fc1_.apply(g, x)));
}

Tensor TimestepEmbedder::embed(double t) {
  Graph g;
  const double times[] = {t};
  return g.value(apply(g, times));
}

void TimestepEmbedder::collect(ParameterList& out) {
  fc1_.collect(out);
  fc2_.collect(out);
}

}  // namespace velocomp::nn
