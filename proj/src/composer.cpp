// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/composer.hpp"

#include <cmath>
#include <tuple>

#include "velocomp/error.hpp"

namespace velocomp::composer {
namespace {

Vec unit_or_zero(std::span<const double> v, bool& degenerate) {
  const double norm = nn::l2_norm(v);
  degenerate = norm < nn::kNormEpsilon;
  if (degenerate) return Vec(v.size(), 0.0);
  Vec out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

}  // namespace

Directions unit_directions(std::span<const double> v_hat_a, std::span<const double> v_hat_o) {
  nn::require_same_width(v_hat_a, v_hat_o, "unit_directions");
  Directions d;
  d.delta_a = unit_or_zero(v_hat_a, d.degenerate_a);
  d.delta_o = unit_or_zero(v_hat_o, d.degenerate_o);
  return d;
}

CoefficientTarget least_squares_coefficients(std::span<const double> delta_a,
                                             std::span<const double> delta_o,
                                             std::span<const double> v_star) {
  nn::require_same_width(delta_a, delta_o, "least_squares_coefficients");
  nn::require_same_width(delta_a, v_star, "least_squares_coefficients");
  const double gaa = nn::dot(delta_a, delta_a);
  const double gao = nn::dot(delta_a, delta_o);
  const double goo = nn::dot(delta_o, delta_o);
  const double ra = nn::dot(delta_a, v_star);
  const double ro = nn::dot(delta_o, v_star);

  CoefficientTarget out;
  const double frob = std::sqrt(gaa * gaa + 2.0 * gao * gao + goo * goo);
  double det = gaa * goo - gao * gao;
  double num_a = goo * ra - gao * ro;
  double num_b = gaa * ro - gao * ra;
  if (det < 1e-10 * frob) {
    const double lambda = 1e-8 * (gaa + goo);
    // Expanded in lambda so the damping is not lost to cancellation against
    // the near-zero undamped terms.
    det += lambda * (gaa + goo) + lambda * lambda;
    num_a += lambda * ra;
    num_b += lambda * ro;
    out.damped = true;
  }
  if (det == 0.0) return out;  // both directions zero
  out.a_star = num_a / det;
  out.b_star = num_b / det;
  return out;
}

std::vector<CoefficientTarget> coefficient_targets(std::span<const CompositionSample> batch) {
  std::vector<CoefficientTarget> out;
  out.reserve(batch.size());
  for (const auto& s : batch) {
    const Directions d = unit_directions(s.v_hat_a, s.v_hat_o);
    nn::require_same_width(s.x0_c, s.x1_c, "composition sample");
    Vec v_star(s.x0_c.size());
    for (std::size_t i = 0; i < v_star.size(); ++i) v_star[i] = s.x1_c[i] - s.x0_c[i];
    out.push_back(least_squares_coefficients(d.delta_a, d.delta_o, v_star));
  }
  return out;
}

Tensor direction_batch(std::span<const CompositionSample> batch) {
  if (batch.empty()) throw ContractError("composer batch is empty");
  const std::size_t dim = batch.front().v_hat_a.size();
  Tensor out({batch.size(), 2 * dim}, 0.0);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const Directions d = unit_directions(batch[r].v_hat_a, batch[r].v_hat_o);
    if (d.delta_a.size() != dim) throw ShapeError("composer batch has ragged widths");
    for (std::size_t i = 0; i < dim; ++i) {
      out(r, i) = d.delta_a[i];
      out(r, dim + i) = d.delta_o[i];
    }
  }
  return out;
}

nn::Var composer_loss_graph(nn::Graph& g, nn::ComposerNet& net, const Tensor& directions,
                            std::span<const CoefficientTarget> targets) {
  if (targets.empty()) throw ContractError("composer loss on an empty batch");
  if (directions.rows() != targets.size()) throw ShapeError("one coefficient target per row required");
  Tensor wanted({targets.size(), 2}, 0.0);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    wanted(r, 0) = targets[r].a_star;
    wanted(r, 1) = targets[r].b_star;
  }
  nn::Var predicted = net.forward(g, g.constant(directions));
  return g.mean(g.row_sq_norm(g.sub(predicted, g.constant(std::move(wanted)))));
}

double composer_loss(nn::ComposerNet& net, std::span<const CompositionSample> batch) {
  if (batch.empty()) throw ContractError("composer loss on an empty batch");
  const auto targets = coefficient_targets(batch);
  nn::Graph g;
  return g.value(composer_loss_graph(g, net, direction_batch(batch), targets)).item();
}

ComposedVelocity compose_velocity(nn::ComposerNet& net, std::span<const double> v_hat_a,
                                  std::span<const double> v_hat_o) {
  const Directions d = unit_directions(v_hat_a, v_hat_o);
  ComposedVelocity out;
  out.velocity.assign(v_hat_a.size(), 0.0);
  if (d.degenerate_a && d.degenerate_o) {
    out.degenerate = true;
    return out;
  }
  std::tie(out.a_hat, out.b_hat) = net.coefficients(d.delta_a, d.delta_o);
  for (std::size_t i = 0; i < out.velocity.size(); ++i) {
    out.velocity[i] = out.a_hat * d.delta_a[i] + out.b_hat * d.delta_o[i];
  }
  return out;
}

Vec compose_transport(std::span<const double> x0_c, std::span<const double> v_hat_c, double h) {
  if (!(h > 0.0)) throw ConfigError("composition step size h must be positive");
  nn::require_same_width(x0_c, v_hat_c, "compose_transport");
  Vec out(x0_c.begin(), x0_c.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * v_hat_c[i];
  return out;
}

}  // namespace velocomp::composer
