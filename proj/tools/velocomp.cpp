// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

// velocomp synth|train|eval|probe [--config PATH] [--seed N] [--out DIR]
//          [--threads N] [--set key=value ...]
//
// Exit codes: 0 ok, 2 config, 3 data/format/protocol, 4 numeric, 1 other.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "velocomp/error.hpp"
#include "velocomp/pipeline/commands.hpp"

namespace {

using namespace velocomp;

struct SharedFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> threads;
  std::vector<std::string> sets;
};

void add_shared(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config, "key=value config file");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads for scoring");
  cmd->add_option("--set", f.sets, "override a config key (key=value)");
}

pipeline::RunConfig build_config(const SharedFlags& f) {
  pipeline::RunConfig c = f.config.empty() ? pipeline::RunConfig{} : pipeline::load_config(f.config);
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    pipeline::apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.seed) pipeline::apply_setting(c, "seed", std::to_string(*f.seed));
  if (!f.out.empty()) c.out = f.out;
  if (f.threads) c.threads = *f.threads;
  return c;
}

int exit_code(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericError*>(&e)) return 4;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const FormatError*>(&e) ||
      dynamic_cast<const ProtocolError*>(&e) || dynamic_cast<const CheckpointError*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const ShapeError*>(&e)) {
    return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-matching compositional zero-shot learning"};
  app.require_subcommand(1);

  SharedFlags synth_flags, train_flags, eval_flags, probe_flags;
  std::string synth_output, dataset_flag, checkpoints, protocol, split;
  bool joint = false;

  auto* synth = app.add_subcommand("synth", "generate a synthetic FCEB dataset");
  add_shared(synth, synth_flags);
  synth->add_option("--output", synth_output, "dataset file (default <out>/dataset.fceb)");

  auto* train = app.add_subcommand("train", "train primitive flows then the composer");
  add_shared(train, train_flags);
  train->add_option("--dataset", dataset_flag, "FCEB dataset (default: synthetic from config)");
  train->add_flag("--joint", joint, "alternate flow and composer updates every epoch");

  auto* eval = app.add_subcommand("eval", "evaluate checkpoints in the closed and open world");
  add_shared(eval, eval_flags);
  eval->add_option("--dataset", dataset_flag, "FCEB dataset");
  eval->add_option("--checkpoints", checkpoints, "checkpoint directory (default <out>)");
  eval->add_option("--protocol", protocol, "closed or open");
  eval->add_option("--split", split, "val or test");

  auto* probe = app.add_subcommand("probe", "cross-branch leakage probe");
  add_shared(probe, probe_flags);
  probe->add_option("--dataset", dataset_flag, "FCEB dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const auto log = [](const std::string& line) { std::cerr << line << "\n"; };
  try {
    if (synth->parsed()) {
      auto c = build_config(synth_flags);
      const std::filesystem::path output = synth_output.empty() ? c.out / "dataset.fceb" : std::filesystem::path(synth_output);
      const auto ds = pipeline::cmd_synth(c, output, log);
      std::cout << pipeline::dataset_summary(ds) << "\n";
    } else if (train->parsed()) {
      auto c = build_config(train_flags);
      if (!dataset_flag.empty()) c.dataset = dataset_flag;
      if (joint) c.joint = true;
      pipeline::cmd_train(c, log);
    } else if (eval->parsed()) {
      auto c = build_config(eval_flags);
      if (!dataset_flag.empty()) c.dataset = dataset_flag;
      if (!protocol.empty()) pipeline::apply_setting(c, "protocol", protocol);
      if (!split.empty()) pipeline::apply_setting(c, "split", split);
      pipeline::cmd_eval(c, checkpoints.empty() ? c.out : std::filesystem::path(checkpoints), log);
    } else if (probe->parsed()) {
      auto c = build_config(probe_flags);
      if (!dataset_flag.empty()) c.dataset = dataset_flag;
      std::cout << pipeline::cmd_probe(c);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
