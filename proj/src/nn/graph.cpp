// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "velocomp/error.hpp"

namespace velocomp::nn {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_rank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected rank-2 tensor, got " + t.shape_string());
}

}  // namespace

Var Graph::push(Tensor value, bool needs_grad, std::function<void()> backprop) {
  Node node;
  node.own = std::move(value);
  node.needs_grad = needs_grad;
  if (needs_grad) node.backprop = std::move(backprop);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Tensor& Graph::grad_ref(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0 && n.value().size() != 0) n.grad = Tensor(n.value().shape(), 0.0);
  return n.grad;
}

void Graph::check_same_shape(Var a, Var b, const char* op) const {
  if (!value(a).same_shape(value(b))) {
    throw ShapeError(std::string(op) + ": shape mismatch " + value(a).shape_string() + " vs " +
                     value(b).shape_string());
  }
}

Var Graph::constant(Tensor value) {
  require_rank2(value, "constant");
  return push(std::move(value), false, nullptr);
}

Var Graph::parameter(Parameter& p) {
  require_rank2(p.value, "parameter");
  Node node;
  node.external = &p.value;
  node.param = &p;
  node.needs_grad = true;
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Tensor& Graph::value(Var v) const { return nodes_.at(v.id).value(); }

const Tensor& Graph::grad(Var v) const {
  const Node& n = nodes_.at(v.id);
  return n.grad.size() ? n.grad : empty_;
}

Var Graph::matmul(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& w = value(b);
  if (x.cols() != w.rows()) {
    throw ShapeError("matmul: " + x.shape_string() + " * " + w.shape_string());
  }
  const std::size_t rows = x.rows(), inner = x.cols(), cols = w.cols();
  Tensor out({rows, cols}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < inner; ++k) {
      const double xv = x(r, k);
      if (xv == 0.0) continue;
      const double* wrow = &w.values()[k * cols];
      double* orow = &out.values()[r * cols];
      for (std::size_t c = 0; c < cols; ++c) orow[c] += xv * wrow[c];
    }
  }
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id, rows, inner, cols] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& x = value(a);
    const Tensor& w = value(b);
    if (needs(a)) {
      double* ga = grad_ref(a.id).values().data();
      const double* gp = g.values().data();
      const double* wp = w.values().data();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < inner; ++k) {
          const double* grow = gp + r * cols;
          const double* wrow = wp + k * cols;
          double acc = 0.0;
          for (std::size_t c = 0; c < cols; ++c) acc += grow[c] * wrow[c];
          ga[r * inner + k] += acc;
        }
    }
    if (needs(b)) {
      double* gb = grad_ref(b.id).values().data();
      const double* gp = g.values().data();
      const double* xp = x.values().data();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < inner; ++k) {
          const double xv = xp[r * inner + k];
          if (xv == 0.0) continue;
          const double* grow = gp + r * cols;
          double* gbrow = gb + k * cols;
          for (std::size_t c = 0; c < cols; ++c) gbrow[c] += xv * grow[c];
        }
    }
  });
}

Var Graph::matmul_nt(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  if (x.cols() != y.cols()) {
    throw ShapeError("matmul_nt: " + x.shape_string() + " * " + y.shape_string() + "^T");
  }
  const std::size_t rows = x.rows(), inner = x.cols(), cols = y.rows();
  Tensor out({rows, cols}, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = dot(x.row_view(r), y.row_view(c));
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id, rows, inner, cols] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    if (needs(a)) {
      Tensor& ga = grad_ref(a.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          const double gv = g(r, c);
          for (std::size_t k = 0; k < inner; ++k) ga(r, k) += gv * y(c, k);
        }
    }
    if (needs(b)) {
      Tensor& gb = grad_ref(b.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          const double gv = g(r, c);
          for (std::size_t k = 0; k < inner; ++k) gb(c, k) += gv * x(r, k);
        }
    }
  });
}

Var Graph::add_bias(Var a, Var bias) {
  const Tensor& x = value(a);
  const Tensor& b = value(bias);
  if (b.rows() != 1 || b.cols() != x.cols()) {
    throw ShapeError("add_bias: " + x.shape_string() + " + " + b.shape_string());
  }
  Tensor out = x;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += b(0, c);
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(bias), [this, a, bias, id] {
    const Tensor& g = nodes_[id].grad;
    if (needs(a)) {
      Tensor& ga = grad_ref(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (needs(bias)) {
      Tensor& gb = grad_ref(bias.id);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
    }
  });
}

Var Graph::add(Var a, Var b) {
  check_same_shape(a, b, "add");
  Tensor out = value(a);
  const Tensor& y = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id] {
    const Tensor& g = nodes_[id].grad;
    for (Var v : {a, b}) {
      if (!needs(v)) continue;
      Tensor& gv = grad_ref(v.id);
      for (std::size_t i = 0; i < g.size(); ++i) gv[i] += g[i];
    }
  });
}

Var Graph::sub(Var a, Var b) {
  check_same_shape(a, b, "sub");
  Tensor out = value(a);
  const Tensor& y = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= y[i];
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id] {
    const Tensor& g = nodes_[id].grad;
    if (needs(a)) {
      Tensor& ga = grad_ref(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (needs(b)) {
      Tensor& gb = grad_ref(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var Graph::mul(Var a, Var b) {
  check_same_shape(a, b, "mul");
  Tensor out = value(a);
  const Tensor& y = value(b);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id] {
    const Tensor& g = nodes_[id].grad;
    if (needs(a)) {
      Tensor& ga = grad_ref(a.id);
      const Tensor& y = value(b);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    }
    if (needs(b)) {
      Tensor& gb = grad_ref(b.id);
      const Tensor& x = value(a);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
    }
  });
}

Var Graph::scale(Var a, double factor) {
  Tensor out = value(a);
  for (double& v : out.values()) v *= factor;
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id, factor] {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
  });
}

Var Graph::add_scalar(Var a, double offset) {
  Tensor out = value(a);
  for (double& v : out.values()) v += offset;
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id] {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

Var Graph::silu(Var a) {
  Tensor out = value(a);
  for (double& v : out.values()) v = v * sigmoid(v);
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& x = value(a);
    Tensor& ga = grad_ref(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = sigmoid(x[i]);
      ga[i] += g[i] * s * (1.0 + x[i] * (1.0 - s));
    }
  });
}

Var Graph::gelu(Var a) {
  // Exact erf form.
  Tensor out = value(a);
  for (double& v : out.values()) v = 0.5 * v * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0));
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& x = value(a);
    Tensor& ga = grad_ref(a.id);
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double cdf = 0.5 * (1.0 + std::erf(x[i] * std::numbers::sqrt2 / 2.0));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x[i] * x[i]);
      ga[i] += g[i] * (cdf + x[i] * pdf);
    }
  });
}

Var Graph::layer_norm(Var a, double eps) {
  const Tensor& x = value(a);
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({rows, cols}, 0.0);
  std::vector<double> inv_std(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mean += x(r, c);
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (x(r, c) - mean) * (x(r, c) - mean);
    var /= static_cast<double>(cols);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = (x(r, c) - mean) * inv_std[r];
  }
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id, rows, cols, inv_std = std::move(inv_std)] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& y = nodes_[id].value();
    Tensor& ga = grad_ref(a.id);
    const double n = static_cast<double>(cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double mean_g = 0.0, mean_gy = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        mean_g += g(r, c);
        mean_gy += g(r, c) * y(r, c);
      }
      mean_g /= n;
      mean_gy /= n;
      for (std::size_t c = 0; c < cols; ++c)
        ga(r, c) += inv_std[r] * (g(r, c) - mean_g - y(r, c) * mean_gy);
    }
  });
}

Var Graph::row_normalize(Var a) {
  const Tensor& x = value(a);
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out = x;
  std::vector<double> norms(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    norms[r] = l2_norm(x.row_view(r));
    const double inv = 1.0 / std::max(norms[r], kNormEpsilon);
    for (std::size_t c = 0; c < cols; ++c) out(r, c) *= inv;
  }
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id, rows, cols, norms = std::move(norms)] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& y = nodes_[id].value();
    Tensor& ga = grad_ref(a.id);
    for (std::size_t r = 0; r < rows; ++r) {
      if (norms[r] > kNormEpsilon) {
        const double proj = dot(y.row_view(r), g.row_view(r));
        for (std::size_t c = 0; c < cols; ++c) ga(r, c) += (g(r, c) - y(r, c) * proj) / norms[r];
      } else {
        // Below the guard the map is a fixed linear scaling.
        for (std::size_t c = 0; c < cols; ++c) ga(r, c) += g(r, c) / kNormEpsilon;
      }
    }
  });
}

Var Graph::slice_cols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = value(a);
  if (begin > end || end > x.cols()) throw ShapeError("slice_cols: range out of bounds");
  const std::size_t rows = x.rows(), width = end - begin;
  Tensor out({rows, width}, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c) out(r, c) = x(r, begin + c);
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id, rows, width, begin] {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = grad_ref(a.id);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < width; ++c) ga(r, begin + c) += g(r, c);
  });
}

Var Graph::concat_cols(Var a, Var b) {
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  if (x.rows() != y.rows()) throw ShapeError("concat_cols: row count mismatch");
  const std::size_t rows = x.rows(), ca = x.cols(), cb = y.cols();
  Tensor out({rows, ca + cb}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < ca; ++c) out(r, c) = x(r, c);
    for (std::size_t c = 0; c < cb; ++c) out(r, ca + c) = y(r, c);
  }
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id, rows, ca, cb] {
    const Tensor& g = nodes_[id].grad;
    if (needs(a)) {
      Tensor& ga = grad_ref(a.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < ca; ++c) ga(r, c) += g(r, c);
    }
    if (needs(b)) {
      Tensor& gb = grad_ref(b.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cb; ++c) gb(r, c) += g(r, ca + c);
    }
  });
}

Var Graph::row_dot(Var a, Var b) {
  check_same_shape(a, b, "row_dot");
  const Tensor& x = value(a);
  const Tensor& y = value(b);
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({rows, 1}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) out(r, 0) = dot(x.row_view(r), y.row_view(r));
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a) || needs(b), [this, a, b, id, rows, cols] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& x = value(a);
    const Tensor& y = value(b);
    if (needs(a)) {
      Tensor& ga = grad_ref(a.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) ga(r, c) += g(r, 0) * y(r, c);
    }
    if (needs(b)) {
      Tensor& gb = grad_ref(b.id);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) gb(r, c) += g(r, 0) * x(r, c);
    }
  });
}

Var Graph::row_sq_norm(Var a) {
  const Tensor& x = value(a);
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({rows, 1}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) out(r, 0) = dot(x.row_view(r), x.row_view(r));
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id, rows, cols] {
    const Tensor& g = nodes_[id].grad;
    const Tensor& x = value(a);
    Tensor& ga = grad_ref(a.id);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) ga(r, c) += 2.0 * g(r, 0) * x(r, c);
  });
}

Var Graph::row_logsumexp(Var a) {
  const Tensor& x = value(a);
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out({rows, 1}, 0.0);
  Tensor softmax({rows, cols}, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = x.row_view(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      softmax(r, c) = std::exp(row[c] - peak);
      total += softmax(r, c);
    }
    for (std::size_t c = 0; c < cols; ++c) softmax(r, c) /= total;
    out(r, 0) = peak + std::log(total);
  }
  const std::size_t id = nodes_.size();
  return push(std::move(out), needs(a), [this, a, id, rows, cols, softmax = std::move(softmax)] {
    const Tensor& g = nodes_[id].grad;
    Tensor& ga = grad_ref(a.id);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) ga(r, c) += g(r, 0) * softmax(r, c);
  });
}

Var Graph::sum(Var a) {
  double total = 0.0;
  for (double v : value(a).values()) total += v;
  const std::size_t id = nodes_.size();
  return push(Tensor::scalar(total), needs(a), [this, a, id] {
    const double g = nodes_[id].grad[0];
    Tensor& ga = grad_ref(a.id);
    for (double& v : ga.values()) v += g;
  });
}

Var Graph::mean(Var a) {
  const std::size_t count = value(a).size();
  if (count == 0) throw ContractError("mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(count));
}

void Graph::backward(Var loss) {
  const Tensor& l = value(loss);
  if (l.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " + l.shape_string());
  }
  for (Node& n : nodes_) n.grad = Tensor();
  if (!nodes_[loss.id].needs_grad) return;
  grad_ref(loss.id)[0] = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.backprop) n.backprop();
    if (n.param) {
      Tensor& pg = n.param->grad;
      if (!pg.same_shape(n.param->value)) pg = Tensor(n.param->value.shape(), 0.0);
      for (std::size_t k = 0; k < pg.size(); ++k) pg[k] += n.grad[k];
    }
  }
}

}  // namespace velocomp::nn
