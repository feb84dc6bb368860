// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/pipeline/commands.hpp"

#include "velocomp/binary_io.hpp"
#include "velocomp/czsl/io.hpp"
#include "velocomp/data/fceb.hpp"
#include "velocomp/data/synthetic.hpp"
#include "velocomp/error.hpp"
#include "velocomp/pipeline/probe.hpp"

namespace velocomp::pipeline {

data::EmbeddingDataset resolve_dataset(const RunConfig& config) {
  if (!config.dataset.empty()) return data::load_dataset(config.dataset);
  return data::generate_synthetic(config.synthetic);
}

std::string dataset_summary(const data::EmbeddingDataset& ds) {
  const auto count = [&](data::Split s) { return std::to_string(ds.split_indices(s).size()); };
  return "M=" + std::to_string(ds.label_space.attribute_count()) +
         " N=" + std::to_string(ds.label_space.object_count()) + " D=" + std::to_string(ds.dim) +
         " seen=" + std::to_string(ds.label_space.seen().size()) +
         " unseen=" + std::to_string(ds.label_space.unseen().size()) + " train=" + count(data::Split::kTrain) +
         " val=" + count(data::Split::kVal) + " test=" + count(data::Split::kTest) +
         (ds.multi_path() ? " multi-path" : " single-path");
}

data::EmbeddingDataset cmd_synth(const RunConfig& config, const std::filesystem::path& output, const Logger& log) {
  config.validate();
  if (!config.dataset.empty()) throw ConfigError("synth generates a dataset; do not set 'dataset'");
  auto ds = data::generate_synthetic(config.synthetic);
  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
  data::save_dataset(ds, output);
  if (log) log("wrote " + output.string());
  return ds;
}

TrainResult cmd_train(const RunConfig& config, const Logger& log) {
  config.validate(true);
  const auto ds = resolve_dataset(config);
  if (log) log(dataset_summary(ds));
  std::string lines;
  auto tee = [&](const std::string& line) {
    lines += line + "\n";
    if (log) log(line);
  };
  TrainResult result = train(ds, config, tee);
  save_models(result.models, config.out);
  io::write_file(config.out / "train_log.txt", lines);
  io::write_file(config.out / "config.txt", dump_config(config));
  return result;
}

EvalOutputs cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoints, const Logger& log) {
  config.validate(true);
  const auto ds = resolve_dataset(config);
  Models models = load_models(checkpoints, ds.dim);
  EvalOutputs out = evaluate(ds, models, config);
  write_eval(out, config.out);
  if (log) {
    log(czsl::report_table(out.closed, "closed world"));
    if (out.open) log(czsl::report_table(*out.open, "open world"));
  }
  return out;
}

std::string cmd_probe(const RunConfig& config, const Logger& log) {
  config.validate(true);
  const auto ds = resolve_dataset(config);
  const auto cells = probe_dataset(ds);
  std::filesystem::create_directories(config.out);
  io::write_file(config.out / "probe.csv", leakage::probe_csv(cells));
  const std::string table = leakage::probe_table(cells);
  if (log) log(table);
  return table;
}

}  // namespace velocomp::pipeline
