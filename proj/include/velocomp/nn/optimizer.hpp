// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "velocomp/nn/graph.hpp"

namespace velocomp::nn {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

// Adam with decoupled weight decay:
//   p <- p - lr * wd * p
//   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
class AdamW {
 public:
  AdamW(ParameterList params, AdamWConfig config);

  // Reads Parameter::grad, updates values, then clears the gradients. Any
  // non-finite gradient aborts the step before anything is modified.
  void step();
  void zero_grad();

  std::uint64_t step_count() const { return step_; }
  const AdamWConfig& config() const { return config_; }
  const Tensor& first_moment(std::size_t i) const { return m_[i]; }
  const Tensor& second_moment(std::size_t i) const { return v_[i]; }

 private:
  ParameterList params_;
  AdamWConfig config_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::uint64_t step_ = 0;
};

}  // namespace velocomp::nn
