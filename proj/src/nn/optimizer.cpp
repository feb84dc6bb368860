// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/optimizer.hpp"

#include <cmath>

#include "velocomp/error.hpp"

namespace velocomp::nn {

AdamW::AdamW(ParameterList params, AdamWConfig config)
    : params_(std::move(params)), config_(config) {
  if (!(config_.lr > 0.0) || config_.beta1 < 0.0 || config_.beta1 >= 1.0 || config_.beta2 < 0.0 ||
      config_.beta2 >= 1.0 || !(config_.eps > 0.0) || config_.weight_decay < 0.0) {
    throw ConfigError("invalid AdamW hyperparameters");
  }
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter* p : params_) {
    m_.emplace_back(p->value.shape(), 0.0);
    v_.emplace_back(p->value.shape(), 0.0);
  }
}

void AdamW::step() {
  for (const Parameter* p : params_) {
    if (!p->grad.same_shape(p->value)) {
      throw ShapeError("gradient of " + p->name + " has shape " + p->grad.shape_string());
    }
    for (std::size_t i = 0; i < p->grad.size(); ++i) {
      if (!std::isfinite(p->grad[i])) {
        throw NumericError("non-finite gradient in parameter " + p->name + " at element " +
                           std::to_string(i));
      }
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bias1 = 1.0 - std::pow(config_.beta1, t);
  const double bias2 = 1.0 - std::pow(config_.beta2, t);
  const double decay = 1.0 - config_.lr * config_.weight_decay;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    Tensor& m = m_[k];
    Tensor& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p.value[i] = p.value[i] * decay - config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
    p.zero_grad();
  }
}

void AdamW::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

}  // namespace velocomp::nn
