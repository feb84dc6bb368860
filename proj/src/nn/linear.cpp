// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/linear.hpp"

#include <cmath>

namespace velocomp::nn {

void Linear::init_fan_in(Rng& rng) {
  const double stddev = 1.0 / std::sqrt(static_cast<double>(in_features()));
  for (double& w : weight.value.values()) w = stddev * rng.normal();
  bias.value.fill(0.0);
}

}  // namespace velocomp::nn
