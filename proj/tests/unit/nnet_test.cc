// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "velocomp/error.hpp"
#include "velocomp/nn/composer_net.hpp"
#include "velocomp/nn/velocity_net.hpp"

namespace velocomp::nn {
namespace {

// Plain-loop reference network pieces. Weights are read from the parameters
// as numbers; all arithmetic is redone here.
using Row = std::vector<double>;

Row affine(const Row& x, const Parameter& w, const Parameter& b) {
  const std::size_t in = w.value.rows(), out = w.value.cols();
  Row y(out, 0.0);
  for (std::size_t j = 0; j < out; ++j) {
    double acc = b.value[j];
    for (std::size_t i = 0; i < in; ++i) acc += x[i] * w.value[i * out + j];
    y[j] = acc;
  }
  return y;
}

Row silu(Row x) {
  for (double& v : x) v = v / (1.0 + std::exp(-v));
  return x;
}

Row gelu(Row x) {
  for (double& v : x) v = 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0)));
  return x;
}

Row layer_norm(const Row& x) {
  double mean = 0.0, var = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  Row y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - mean) / std::sqrt(var + 1e-6);
  return y;
}

std::map<std::string, Parameter*> by_name(ParameterList params) {
  std::map<std::string, Parameter*> out;
  for (Parameter* p : params) out[p->name] = p;
  return out;
}

void hand_set(ParameterList params) {
  double k = 0.0;
  for (Parameter* p : params) {
    for (double& v : p->value.values()) {
      v = 0.6 * std::sin(1.3 * k + 0.4) + 0.1;
      k += 1.0;
    }
  }
}

Row reference_embed(std::map<std::string, Parameter*>& p, double t, std::size_t freq) {
  Row feat(2 * freq);
  for (std::size_t k = 0; k < freq; ++k) {
    const double f = freq == 1 ? 1.0 : std::pow(1000.0, static_cast<double>(k) / static_cast<double>(freq - 1));
    feat[k] = std::cos(f * t);
    feat[freq + k] = std::sin(f * t);
  }
  return affine(silu(affine(feat, *p["temb.fc1.weight"], *p["temb.fc1.bias"])), *p["temb.fc2.weight"],
                *p["temb.fc2.bias"]);
}

TEST(Timestep, ZeroWeightsGiveZeroEmbedding) {
  TimestepEmbedder e(4, 5);
  const Tensor out = e.embed(0.0);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Timestep, DeterministicForFixedWeights) {
  TimestepEmbedder e(4, 5);
  Rng rng(3);
  e.init(rng);
  EXPECT_EQ(e.embed(0.5), e.embed(0.5));
}

TEST(Timestep, RejectsTimesOutsideUnitInterval) {
  TimestepEmbedder e(4, 5);
  EXPECT_THROW(e.embed(-0.01), DomainError);
  EXPECT_THROW(e.embed(1.01), DomainError);
  EXPECT_THROW(e.embed(std::nan("")), DomainError);
}

TEST(Timestep, FrequenciesAreLogSpacedFromOneToThousand) {
  TimestepEmbedder e(4, 2);
  ASSERT_EQ(e.frequencies().size(), 4u);
  EXPECT_DOUBLE_EQ(e.frequencies()[0], 1.0);
  EXPECT_NEAR(e.frequencies()[1], 10.0, 1e-12);
  EXPECT_NEAR(e.frequencies()[2], 100.0, 1e-10);
  EXPECT_NEAR(e.frequencies()[3], 1000.0, 1e-9);
}

TEST(Timestep, QuarterTimeMatchesReferenceWithFourFrequencies) {
  TimestepEmbedder e(4, 3);
  ParameterList params;
  e.collect(params);
  Rng rng(2026);
  e.init(rng);
  auto p = by_name(params);
  const Row want = reference_embed(p, 0.25, 4);
  const Tensor got = e.embed(0.25);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-13);
}

TEST(VelocityNet, ZeroHeadGivesZeroVelocity) {
  VelocityNet net({4, 8, 2, 3});
  Rng rng(1);
  net.init(rng);
  for (double t : {0.0, 0.3, 1.0}) {
    const Vec v = net.velocity(Vec{0.3, -1.0, 2.0, 0.5}, t);
    for (double x : v) EXPECT_EQ(x, 0.0);
  }
}

TEST(VelocityNet, OutputWidthEqualsInputWidth) {
  VelocityNet net({5, 6, 1, 2});
  Rng rng(4);
  oracle::randomize(net.parameters(), rng);
  Tensor x({3, 5}, 0.2);
  const std::vector<double> t = {0.0, 0.5, 1.0};
  EXPECT_EQ(net.forward(x, t).shape(), x.shape());
  EXPECT_THROW(net.velocity(Vec{1.0, 2.0}, 0.5), ShapeError);
  EXPECT_THROW(net.forward(x, std::vector<double>{0.1}), ShapeError);
}

TEST(VelocityNet, DeterministicForward) {
  VelocityNet net({3, 4, 2, 2});
  Rng rng(5);
  oracle::randomize(net.parameters(), rng);
  EXPECT_EQ(net.velocity(Vec{1, 2, 3}, 0.4), net.velocity(Vec{1, 2, 3}, 0.4));
}

TEST(VelocityNet, ZeroGatesMakeOutputIndependentOfTime) {
  VelocityNet net({3, 4, 2, 3});
  Rng rng(6);
  oracle::randomize(net.parameters(), rng);
  net.zero_gates();
  const Vec a = net.velocity(Vec{0.5, -0.2, 1.0}, 0.0);
  const Vec b = net.velocity(Vec{0.5, -0.2, 1.0}, 0.9);
  EXPECT_EQ(a, b);
  // With the residual stream untouched the output is head(LN(in_proj(x))).
  auto p = by_name(net.parameters());
  const Row want = affine(layer_norm(affine({0.5, -0.2, 1.0}, *p["in_proj.weight"], *p["in_proj.bias"])),
                          *p["head.weight"], *p["head.bias"]);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], want[i], 1e-13);
}

TEST(VelocityNet, OneBlockTwoDimMatchesReference) {
  VelocityNet net({2, 3, 1, 2});
  hand_set(net.parameters());
  auto p = by_name(net.parameters());
  const Row x = {0.7, -1.2};
  const double t = 0.35;
  const std::size_t w = 3;
  const Row cond = silu(reference_embed(p, t, 2));
  Row h = affine(x, *p["in_proj.weight"], *p["in_proj.bias"]);
  const Row mod = affine(cond, *p["blocks.0.ada.weight"], *p["blocks.0.ada.bias"]);
  const Row ln = layer_norm(h);
  Row m(w);
  for (std::size_t i = 0; i < w; ++i) m[i] = ln[i] * (1.0 + mod[w + i]) + mod[i];
  const Row y = affine(silu(affine(m, *p["blocks.0.fc1.weight"], *p["blocks.0.fc1.bias"])), *p["blocks.0.fc2.weight"],
                       *p["blocks.0.fc2.bias"]);
  for (std::size_t i = 0; i < w; ++i) h[i] += mod[2 * w + i] * y[i];
  const Row want = affine(layer_norm(h), *p["head.weight"], *p["head.bias"]);
  const Vec got = net.velocity(x, t);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_NEAR(got[0], want[0], 1e-13);
  EXPECT_NEAR(got[1], want[1], 1e-13);
}

TEST(VelocityNet, ParameterNamesAreStable) {
  VelocityNet net({2, 3, 2, 2});
  std::vector<std::string> names;
  for (Parameter* p : net.parameters()) names.push_back(p->name);
  const std::vector<std::string> want = {
      "temb.fc1.weight", "temb.fc1.bias", "temb.fc2.weight", "temb.fc2.bias", "in_proj.weight", "in_proj.bias",
      "blocks.0.ada.weight", "blocks.0.ada.bias", "blocks.0.fc1.weight", "blocks.0.fc1.bias", "blocks.0.fc2.weight",
      "blocks.0.fc2.bias", "blocks.1.ada.weight", "blocks.1.ada.bias", "blocks.1.fc1.weight", "blocks.1.fc1.bias",
      "blocks.1.fc2.weight", "blocks.1.fc2.bias", "head.weight", "head.bias"};
  EXPECT_EQ(names, want);
}

TEST(ComposerNet, ZeroHeadGivesZeroCoefficients) {
  ComposerNet net({3, 8, 2});
  Rng rng(7);
  net.init(rng);
  net.head().weight.value.fill(0.0);
  net.head().bias.value.fill(0.0);
  const auto [a, b] = net.coefficients(Vec{1, 0, 0}, Vec{0, 1, 0});
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(ComposerNet, DeterministicAndShapeChecked) {
  ComposerNet net({3, 4, 1});
  Rng rng(8);
  net.init(rng);
  EXPECT_EQ(net.coefficients(Vec{1, 2, 3}, Vec{3, 2, 1}), net.coefficients(Vec{1, 2, 3}, Vec{3, 2, 1}));
  EXPECT_THROW(net.coefficients(Vec{1, 2}, Vec{3, 2, 1}), ShapeError);
}

TEST(ComposerNet, TinyNetMatchesReference) {
  ComposerNet net({2, 3, 1});
  hand_set(net.parameters());
  auto p = by_name(net.parameters());
  const Row da = {0.6, 0.8}, dob = {-0.8, 0.6};
  const Row in = {da[0], da[1], dob[0], dob[1]};
  Row h = affine(in, *p["in_proj.weight"], *p["in_proj.bias"]);
  const Row y = affine(gelu(affine(layer_norm(h), *p["blocks.0.fc1.weight"], *p["blocks.0.fc1.bias"])),
                       *p["blocks.0.fc2.weight"], *p["blocks.0.fc2.bias"]);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] += y[i];
  const Row want = affine(gelu(layer_norm(h)), *p["head.weight"], *p["head.bias"]);
  const auto [a, b] = net.coefficients(da, dob);
  EXPECT_NEAR(a, want[0], 1e-13);
  EXPECT_NEAR(b, want[1], 1e-13);
}

TEST(Init, FanInVarianceAndZeroBias) {
  Linear l("l", 400, 50);
  Rng rng(9);
  l.init_fan_in(rng);
  double sq = 0.0;
  for (double v : l.weight.value.values()) sq += v * v;
  const double var = sq / static_cast<double>(l.weight.value.size());
  EXPECT_NEAR(var, 1.0 / 400.0, 0.1 / 400.0);
  for (double v : l.bias.value.values()) EXPECT_EQ(v, 0.0);
}

}  // namespace
}  // namespace velocomp::nn
