// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "velocomp/nn/tensor.hpp"

namespace velocomp::nn {

// Trainable tensor. `grad` accumulates across Graph::backward calls until the
// optimizer (or the caller) clears it.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape(), 0.0) {}
  void zero_grad() { grad.fill(0.0); }
};

using ParameterList = std::vector<Parameter*>;

// Handle to a node of a Graph.
struct Var {
  std::size_t id = 0;
};

// Tape of rank-2 operations recorded eagerly. Values are computed as nodes are
// added; backward() walks the tape in reverse and accumulates gradients into
// the Parameters referenced by the graph. A graph is single-use and must not
// outlive the Parameters it references.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  Var parameter(Parameter& p);

  const Tensor& value(Var v) const;
  // Gradient of the last backward() target w.r.t. v; zeros if v did not
  // participate.
  const Tensor& grad(Var v) const;

  // [B x I] * [I x O]
  Var matmul(Var a, Var b);
  // [B x I] * [K x I]^T
  Var matmul_nt(Var a, Var b);
  // x [B x O] + bias [1 x O] broadcast over rows.
  Var add_bias(Var x, Var bias);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double factor);
  Var add_scalar(Var a, double offset);
  Var silu(Var a);
  Var gelu(Var a);
  // Per-row normalization to zero mean and unit variance, no affine terms.
  Var layer_norm(Var a, double eps = 1e-6);
  // Per-row x / max(||x||, 1e-12).
  Var row_normalize(Var a);
  Var slice_cols(Var a, std::size_t begin, std::size_t end);
  Var concat_cols(Var a, Var b);
  // Row-wise reductions producing [B x 1].
  Var row_dot(Var a, Var b);
  Var row_sq_norm(Var a);
  Var row_logsumexp(Var a);
  // Full reductions producing [1 x 1].
  Var sum(Var a);
  Var mean(Var a);

  // Requires a [1 x 1] loss node.
  void backward(Var loss);

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor own;
    const Tensor* external = nullptr;
    Parameter* param = nullptr;
    bool needs_grad = false;
    Tensor grad;
    std::function<void()> backprop;

    const Tensor& value() const { return external ? *external : own; }
  };

  Var push(Tensor value, bool needs_grad, std::function<void()> backprop);
  Tensor& grad_ref(std::size_t id);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  void check_same_shape(Var a, Var b, const char* op) const;

  std::vector<Node> nodes_;
  Tensor empty_;
};

}  // namespace velocomp::nn
