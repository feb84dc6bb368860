// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/data/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "velocomp/error.hpp"
#include "velocomp/rng.hpp"

namespace velocomp::data {
namespace {

// Values go through f32 once at generation so a save/load cycle is exact.
double to_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

Vec random_unit(Rng& rng, std::size_t dim) {
  Vec v(dim);
  for (double& x : v) x = rng.normal();
  return nn::normalized(v);
}

// Orthonormal rows from Gram-Schmidt on Gaussian rows.
std::vector<Vec> random_rotation(Rng& rng, std::size_t dim) {
  std::vector<Vec> q;
  while (q.size() < dim) {
    Vec v(dim);
    for (double& x : v) x = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& u : q) {
        const double d = nn::dot(u, v);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= d * u[i];
      }
    }
    if (nn::l2_norm(v) < 1e-6) continue;
    q.push_back(nn::normalized(v));
  }
  return q;
}

}  // namespace

std::size_t SyntheticConfig::seen_count() const {
  return static_cast<std::size_t>(std::llround(seen_fraction * static_cast<double>(attributes * objects)));
}

void SyntheticConfig::validate() const {
  if (attributes == 0 || objects == 0) throw ConfigError("synthetic space needs at least one attribute and object");
  if (attributes * objects < 4) throw ConfigError("synthetic space needs M*N >= 4");
  if (dim == 0) throw ConfigError("synthetic dim must be positive");
  if (!(seen_fraction > 0.0 && seen_fraction < 1.0)) throw ConfigError("seen_fraction must lie in (0, 1)");
  const std::size_t seen = seen_count();
  if (seen >= attributes * objects) throw ConfigError("seen_fraction leaves no unseen pair");
  if (seen < std::max(attributes, objects)) {
    throw ConfigError("seen_fraction too small: " + std::to_string(seen) + " seen pairs cannot cover " +
                      std::to_string(attributes) + " attributes and " + std::to_string(objects) + " objects");
  }
  if (!(attr_noise >= 0.0) || !(obj_noise >= 0.0)) throw ConfigError("noise levels must be non-negative");
  if (!(leakage >= 0.0 && leakage <= 1.0)) throw ConfigError("leakage coefficient must lie in [0, 1]");
  if (!(modality_gap >= 0.0 && modality_gap <= 1.0)) throw ConfigError("modality_gap must lie in [0, 1]");
  if (train_per_pair == 0) throw ConfigError("train_per_pair must be positive");
}

EmbeddingDataset generate_synthetic(const SyntheticConfig& c) {
  c.validate();
  Rng root(c.seed);
  Rng geometry = root.split();
  Rng partition = root.split();
  Rng noise = root.split();
  const std::size_t m = c.attributes, n = c.objects, d = c.dim;

  std::vector<Vec> a_lat, o_lat;
  for (std::size_t i = 0; i < m; ++i) a_lat.push_back(random_unit(geometry, d));
  for (std::size_t i = 0; i < n; ++i) o_lat.push_back(random_unit(geometry, d));
  const std::vector<Vec> rot = random_rotation(geometry, d);
  auto to_visual = [&](const Vec& x) {
    Vec out(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double rx = c.modality_gap > 0.0 ? nn::dot(rot[i], x) : 0.0;
      out[i] = to_f32((1.0 - c.modality_gap) * x[i] + c.modality_gap * rx);
    }
    return out;
  };

  // Every primitive is covered first, then the remaining seen slots are drawn
  // from the shuffled leftover pairs.
  std::vector<std::size_t> pa(m), po(n);
  for (std::size_t i = 0; i < m; ++i) pa[i] = i;
  for (std::size_t i = 0; i < n; ++i) po[i] = i;
  partition.shuffle(pa);
  partition.shuffle(po);
  std::vector<std::uint8_t> is_seen(m * n, 0);
  for (std::size_t i = 0; i < std::max(m, n); ++i) is_seen[pa[i % m] * n + po[i % n]] = 1;
  std::vector<std::size_t> rest;
  for (std::size_t k = 0; k < m * n; ++k) {
    if (!is_seen[k]) rest.push_back(k);
  }
  partition.shuffle(rest);
  const std::size_t covered = std::max(m, n);
  for (std::size_t i = 0; i + covered < c.seen_count(); ++i) is_seen[rest[i]] = 1;
  std::vector<Pair> seen, unseen;
  for (std::uint32_t a = 0; a < m; ++a) {
    for (std::uint32_t o = 0; o < n; ++o) (is_seen[a * n + o] ? seen : unseen).push_back({a, o});
  }
  czsl::LabelSpace space(attribute_labels(m), object_labels(n), seen, unseen);

  Tensor attr_text({m, d}, 0.0), obj_text({n, d}, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < d; ++k) attr_text(i, k) = to_f32(a_lat[i][k]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) obj_text(i, k) = to_f32(o_lat[i][k]);
  const std::vector<Pair> order = composition_order(space, true);
  auto comp_of = [&](Pair p) {
    Vec s(d);
    for (std::size_t k = 0; k < d; ++k) s[k] = a_lat[p.attr][k] + o_lat[p.obj][k];
    return nn::normalized(s);
  };
  Tensor comp_text({order.size(), d}, 0.0);
  for (std::size_t r = 0; r < order.size(); ++r) {
    const Vec s = comp_of(order[r]);
    for (std::size_t k = 0; k < d; ++k) comp_text(r, k) = to_f32(s[k]);
  }

  const double comp_noise = 0.5 * (c.attr_noise + c.obj_noise);
  auto make_sample = [&](Pair p, Split split) {
    Sample s;
    s.attr = p.attr;
    s.obj = p.obj;
    s.split = split;
    auto noisy = [&](const Vec& base, const Vec* leak, double sigma) {
      Vec x(d);
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = base[k] + sigma * noise.normal() + (leak ? c.leakage * (*leak)[k] : 0.0);
      }
      return to_visual(x);
    };
    if (c.multi_path) {
      s.attr_feature = noisy(a_lat[p.attr], &o_lat[p.obj], c.attr_noise);
      s.obj_feature = noisy(o_lat[p.obj], &a_lat[p.attr], c.obj_noise);
    }
    s.comp_feature = noisy(comp_of(p), nullptr, comp_noise);
    return s;
  };

  std::vector<Sample> samples;
  for (Pair p : seen)
    for (std::size_t i = 0; i < c.train_per_pair; ++i) samples.push_back(make_sample(p, Split::kTrain));
  for (Split split : {Split::kVal, Split::kTest}) {
    for (const auto* table : {&seen, &unseen})
      for (Pair p : *table)
        for (std::size_t i = 0; i < c.eval_per_pair; ++i) samples.push_back(make_sample(p, split));
  }
  return make_dataset(std::move(space), std::move(attr_text), std::move(obj_text), std::move(comp_text), true,
                      c.multi_path ? kMultiPath : kSinglePath, std::move(samples));
}

}  // namespace velocomp::data
