// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace velocomp::nn {

// Dense row-major array of doubles. Networks work on rank-2 tensors laid out
// as [batch x features]; a single vector is a 1 x D row.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor row(std::span<const double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::initializer_list<double> values);
  static Tensor scalar(double value) { return Tensor({1, 1}, {value}); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

  // Rank-2 views; a rank-1 tensor is treated as one row.
  std::size_t rows() const { return shape_.size() == 2 ? shape_[0] : rows_slow(); }
  std::size_t cols() const { return shape_.size() == 2 ? shape_[1] : cols_slow(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  std::span<const double> row_view(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols(), cols());
  }
  std::span<double> row_view(std::size_t r) {
    return std::span<double>(data_).subspan(r * cols(), cols());
  }

  double item() const;
  bool all_finite() const;
  void fill(double value);
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_slow() const;
  std::size_t cols_slow() const;

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Small vector helpers shared by the flow, composer and scoring code.
using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);
// x / max(||x||, 1e-12)
Vec normalized(std::span<const double> a);
void require_same_width(std::span<const double> a, std::span<const double> b,
                        const char* what);

inline constexpr double kNormEpsilon = 1e-12;

}  // namespace velocomp::nn
