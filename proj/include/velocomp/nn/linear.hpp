// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "velocomp/nn/graph.hpp"
#include "velocomp/rng.hpp"

namespace velocomp::nn {

// y = x W + b with W stored [in x out].
struct Linear {
  Parameter weight;
  Parameter bias;

  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out)
      : weight(name + ".weight", Tensor({in, out}, 0.0)),
        bias(name + ".bias", Tensor({1, out}, 0.0)) {}

  std::size_t in_features() const { return weight.value.rows(); }
  std::size_t out_features() const { return weight.value.cols(); }

  // Gaussian with variance 1/fan_in; bias zero.
  void init_fan_in(Rng& rng);

  Var apply(Graph& g, Var x) {
    return g.add_bias(g.matmul(x, g.parameter(weight)), g.parameter(bias));
  }

  void collect(ParameterList& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }
};

}  // namespace velocomp::nn
