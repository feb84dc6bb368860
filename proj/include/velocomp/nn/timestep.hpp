// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "velocomp/nn/linear.hpp"

namespace velocomp::nn {

// Maps flow time t in [0, 1] to a conditioning vector: sinusoidal features at
// frequencies log-spaced over [1, 1000], then Linear -> SiLU -> Linear.
class TimestepEmbedder {
 public:
  TimestepEmbedder() = default;
  TimestepEmbedder(std::size_t frequency_count, std::size_t width);

  std::size_t frequency_count() const { return frequencies_.size(); }
  std::size_t width() const { return fc2_.out_features(); }
  const std::vector<double>& frequencies() const { return frequencies_; }

  void init(Rng& rng);

  // [B x 2F] rows of (cos(f_k t) ..., sin(f_k t) ...). Throws DomainError
  // for t outside [0, 1].
  Tensor features(std::span<const double> times) const;

  Var apply(Graph& g, std::span<const double> times);
  // Single-time convenience returning a 1 x width tensor.
  Tensor embed(double t);

  void collect(ParameterList& out);
  Linear& fc1() { return fc1_; }
  Linear& fc2() { return fc2_; }

 private:
  std::vector<double> frequencies_;
  Linear fc1_;
  Linear fc2_;
};

void check_time(double t);

}  // namespace velocomp::nn
