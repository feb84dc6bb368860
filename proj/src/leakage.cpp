// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/leakage.hpp"

#include <cstdio>
#include <limits>

#include "velocomp/error.hpp"

namespace velocomp::leakage {
namespace {

void split_batch(std::span<const LeakPath> batch, Tensor& x0, Tensor& x1) {
  if (batch.empty()) throw ContractError("leakage loss on an empty batch");
  std::vector<Vec> a, b;
  const Branch target = batch.front().target();
  for (const LeakPath& p : batch) {
    if (p.target() != target) throw ContractError("leak batch mixes target branches");
    a.push_back(p.x0());
    b.push_back(p.x1());
  }
  x0 = flow::stack_rows(a);
  x1 = flow::stack_rows(b);
}

std::vector<double> draw_times(std::size_t n, Rng& rng) {
  std::vector<double> times(n);
  for (double& t : times) t = rng.uniform_closed();
  return times;
}

}  // namespace

LeakPath::LeakPath(Branch source, Branch target, Vec x0, Vec x1, std::size_t label)
    : source_(source), target_(target), x0_(std::move(x0)), x1_(std::move(x1)), label_(label) {
  if (source == target) throw ContractError("leak path source and target branch must differ");
  if (target == Branch::kComposition) throw ContractError("leak path target must be a primitive branch");
  nn::require_same_width(x0_, x1_, "leak path");
}

Vec leak_interpolate(const LeakPath& path, double t) {
  return flow::interpolate(flow::FlowPair{path.x0(), path.x1(), path.target(), path.label()}, t);
}

double leak_mse_loss(nn::VelocityNet& net, std::span<const LeakPath> batch,
                     std::span<const double> times) {
  Tensor x0, x1;
  split_batch(batch, x0, x1);
  // The CE term needs some vocabulary; a single row keeps it cheap and it is
  // not read.
  const BranchVocabulary dummy(batch.front().target(), Tensor({1, x0.cols()}, 1.0), {"_"});
  nn::Graph g;
  return g.value(flow::fm_loss_graph(g, net, x0, x1, times, dummy, {}).mse).item();
}

double leak_mse_loss(nn::VelocityNet& net, std::span<const LeakPath> batch, Rng& rng) {
  return leak_mse_loss(net, batch, draw_times(batch.size(), rng));
}

double leak_ce_loss(nn::VelocityNet& net, std::span<const LeakPath> batch,
                    const BranchVocabulary& vocab, double tau, std::span<const double> times) {
  Tensor x0, x1;
  split_batch(batch, x0, x1);
  if (batch.front().target() != vocab.branch()) throw ContractError("vocabulary does not match leak target");
  nn::Graph g;
  flow::FlowLossConfig config;
  config.tau = tau;
  return g.value(flow::fm_loss_graph(g, net, x0, x1, times, vocab, config).ce).item();
}

double leak_ce_loss(nn::VelocityNet& net, std::span<const LeakPath> batch,
                    const BranchVocabulary& vocab, double tau, Rng& rng) {
  return leak_ce_loss(net, batch, vocab, tau, draw_times(batch.size(), rng));
}

nn::Var leakage_loss_graph(nn::Graph& g, nn::VelocityNet& net, std::span<const SourceBatch> sources,
                           std::span<const std::vector<double>> times, const BranchVocabulary& vocab,
                           const flow::FlowLossConfig& config) {
  if (sources.empty()) throw ContractError("leakage loss needs at least one source branch");
  if (times.size() != sources.size()) throw ShapeError("one time vector per source batch required");
  nn::Var total{};
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s].source == vocab.branch()) throw ContractError("leak source equals target branch");
    nn::Var term = flow::fm_loss_graph(g, net, sources[s].x0, sources[s].x1, times[s], vocab, config).total;
    total = s == 0 ? term : g.add(total, term);
  }
  return sources.size() == 1 ? total : g.scale(total, 1.0 / static_cast<double>(sources.size()));
}

double leakage_total_loss(nn::VelocityNet& net, std::span<const std::vector<LeakPath>> by_source,
                          const BranchVocabulary& vocab, const flow::FlowLossConfig& config, Rng& rng) {
  std::vector<SourceBatch> sources;
  std::vector<std::vector<double>> times;
  for (const auto& batch : by_source) {
    if (batch.empty()) continue;
    SourceBatch sb{batch.front().source(), {}, {}};
    for (const LeakPath& p : batch) {
      if (p.source() != sb.source) throw ContractError("source batch mixes source branches");
    }
    split_batch(batch, sb.x0, sb.x1);
    times.push_back(draw_times(batch.size(), rng));
    sources.push_back(std::move(sb));
  }
  nn::Graph g;
  return g.value(leakage_loss_graph(g, net, sources, times, vocab, config)).item();
}

double balanced_accuracy(std::span<const Vec> features, std::span<const std::size_t> labels,
                         const BranchVocabulary& vocab, std::vector<std::size_t>* empty_classes) {
  if (features.size() != labels.size()) throw ShapeError("one label per feature required");
  std::vector<std::size_t> hits(vocab.size(), 0), counts(vocab.size(), 0);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (labels[i] >= vocab.size()) throw ContractError("probe label out of range");
    const Vec q = nn::normalized(features[i]);
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < vocab.size(); ++k) {
      const double s = nn::dot(q, vocab.normalized().row_view(k));
      if (s > best_score) {
        best_score = s;
        best = k;
      }
    }
    ++counts[labels[i]];
    if (best == labels[i]) ++hits[labels[i]];
  }
  double total = 0.0;
  std::size_t classes = 0;
  for (std::size_t k = 0; k < vocab.size(); ++k) {
    if (counts[k] == 0) {
      if (empty_classes) empty_classes->push_back(k);
      continue;
    }
    total += static_cast<double>(hits[k]) / static_cast<double>(counts[k]);
    ++classes;
  }
  if (classes == 0) throw ContractError("probe has no labeled samples");
  return total / static_cast<double>(classes);
}

std::vector<ProbeCell> leakage_probe(std::span<const std::vector<LabeledFeature>> features_by_branch,
                                     std::span<const Branch> branches, const BranchVocabulary& attr_vocab,
                                     const BranchVocabulary& obj_vocab) {
  if (features_by_branch.size() != branches.size()) throw ShapeError("one feature set per branch required");
  const double attr_chance = 1.0 / static_cast<double>(attr_vocab.size());
  const double obj_chance = 1.0 / static_cast<double>(obj_vocab.size());
  std::vector<ProbeCell> cells;
  cells.push_back({"random", "attribute", attr_chance, attr_chance, {}});
  cells.push_back({"random", "object", obj_chance, obj_chance, {}});
  for (std::size_t b = 0; b < branches.size(); ++b) {
    std::vector<Vec> feats;
    std::vector<std::size_t> attrs, objs;
    for (const auto& lf : features_by_branch[b]) {
      feats.push_back(lf.feature);
      attrs.push_back(lf.attr);
      objs.push_back(lf.obj);
    }
    const std::string name(flow::branch_name(branches[b]));
    ProbeCell attr_cell{name, "attribute", 0.0, attr_chance, {}};
    attr_cell.balanced_accuracy = balanced_accuracy(feats, attrs, attr_vocab, &attr_cell.empty_classes);
    ProbeCell obj_cell{name, "object", 0.0, obj_chance, {}};
    obj_cell.balanced_accuracy = balanced_accuracy(feats, objs, obj_vocab, &obj_cell.empty_classes);
    cells.push_back(std::move(attr_cell));
    cells.push_back(std::move(obj_cell));
  }
  return cells;
}

std::string probe_table(std::span<const ProbeCell> cells) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %-11s %18s %10s\n", "feature_branch", "label_kind",
                "balanced_accuracy", "chance");
  out += line;
  for (const auto& c : cells) {
    std::snprintf(line, sizeof(line), "%-14s %-11s %18.4f %10.4f\n", c.feature_branch.c_str(),
                  c.label_kind.c_str(), c.balanced_accuracy, c.chance);
    out += line;
  }
  return out;
}

std::string probe_csv(std::span<const ProbeCell> cells) {
  std::string out = "feature_branch,label_kind,balanced_accuracy,chance\n";
  char line[160];
  for (const auto& c : cells) {
    std::snprintf(line, sizeof(line), "%s,%s,%.17g,%.17g\n", c.feature_branch.c_str(), c.label_kind.c_str(),
                  c.balanced_accuracy, c.chance);
    out += line;
  }
  return out;
}

}  // namespace velocomp::leakage
