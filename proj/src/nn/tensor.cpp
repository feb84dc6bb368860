// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "velocomp/error.hpp"

namespace velocomp::nn {
namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

Tensor Tensor::row(std::span<const double> values) {
  return Tensor({1, values.size()}, std::vector<double>(values.begin(), values.end()));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

std::size_t Tensor::rows_slow() const {
  if (shape_.size() == 1) return 1;
  throw ShapeError("rows() needs a rank-1 or rank-2 tensor, got " + shape_string());
}

std::size_t Tensor::cols_slow() const {
  if (shape_.size() == 1) return shape_[0];
  throw ShapeError("cols() needs a rank-1 or rank-2 tensor, got " + shape_string());
}

double Tensor::item() const {
  if (data_.size() != 1) throw ContractError("item() on tensor of shape " + shape_string());
  return data_[0];
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string Tensor::shape_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) out += " x ";
    out += std::to_string(shape_[i]);
  }
  return out + "]";
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_width(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vec normalized(std::span<const double> a) {
  const double scale = 1.0 / std::max(l2_norm(a), kNormEpsilon);
  Vec out(a.begin(), a.end());
  for (double& v : out) v *= scale;
  return out;
}

void require_same_width(std::span<const double> a, std::span<const double> b,
                        const char* what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": width mismatch " + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()));
  }
}

}  // namespace velocomp::nn
