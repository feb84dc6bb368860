// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "velocomp/nn/composer_net.hpp"
#include "velocomp/nn/graph.hpp"

namespace velocomp::composer {

using nn::Tensor;
using nn::Vec;

struct CompositionSample {
  Vec v_hat_a;
  Vec v_hat_o;
  Vec x0_c;
  Vec x1_c;
};

struct CoefficientTarget {
  double a_star = 0.0;
  double b_star = 0.0;
  // Set when the Gram matrix was near-singular and Tikhonov damping applied.
  bool damped = false;
};

struct Directions {
  Vec delta_a;
  Vec delta_o;
  // A degenerate direction had norm below 1e-12 and is returned as zeros.
  bool degenerate_a = false;
  bool degenerate_o = false;
};

Directions unit_directions(std::span<const double> v_hat_a, std::span<const double> v_hat_o);

// argmin_{a,b} ||a delta_a + b delta_o - v_star||^2 through the 2x2 normal
// equations G [a b]^T = [delta_a.v, delta_o.v]. When det(G) < 1e-10 ||G||_F
// the diagonal is damped by 1e-8 trace(G), which selects the symmetric
// minimum-norm solution for collinear directions.
CoefficientTarget least_squares_coefficients(std::span<const double> delta_a,
                                             std::span<const double> delta_o,
                                             std::span<const double> v_star);

// Targets are computed from (delta_a, delta_o, x1_c - x0_c) per sample and
// treated as constants.
std::vector<CoefficientTarget> coefficient_targets(std::span<const CompositionSample> batch);

// mean_b (a_hat - a_star)^2 + (b_hat - b_star)^2 on the graph. `directions`
// is [B x 2D] with rows [delta_a || delta_o].
nn::Var composer_loss_graph(nn::Graph& g, nn::ComposerNet& net, const Tensor& directions,
                            std::span<const CoefficientTarget> targets);

double composer_loss(nn::ComposerNet& net, std::span<const CompositionSample> batch);

// Builds the [B x 2D] composer input for a batch.
Tensor direction_batch(std::span<const CompositionSample> batch);

struct ComposedVelocity {
  Vec velocity;
  double a_hat = 0.0;
  double b_hat = 0.0;
  // Both primitive velocities were degenerate; velocity is zero.
  bool degenerate = false;
};

// a_hat norm(v_a) + b_hat norm(v_o), coefficients from the composer.
ComposedVelocity compose_velocity(nn::ComposerNet& net, std::span<const double> v_hat_a,
                                  std::span<const double> v_hat_o);

// x0_c + h v_c; h must be positive.
Vec compose_transport(std::span<const double> x0_c, std::span<const double> v_hat_c, double h);

}  // namespace velocomp::composer
