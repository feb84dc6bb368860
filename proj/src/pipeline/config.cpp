// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/pipeline/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

#include "velocomp/binary_io.hpp"
#include "velocomp/czsl/feasibility.hpp"
#include "velocomp/error.hpp"

namespace velocomp::pipeline {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string bad_value(std::string_view key, std::string_view value, const char* expected) {
  return "config key '" + std::string(key) + "': '" + std::string(value) + "' is not " + expected;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError(bad_value(key, v, "a finite number"));
  }
  return out;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(bad_value(key, v, "a non-negative integer"));
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(bad_value(key, v, "a boolean"));
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(to_double(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError(bad_value(key, v, "a comma-separated list"));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field size_field(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.*member = to_u64(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt(c.*member); }};
}

Field synth_size(std::size_t data::SyntheticConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.synthetic.*member = to_u64(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.synthetic.*member); }};
}

Field synth_double(double data::SyntheticConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.synthetic.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt(c.synthetic.*member); }};
}

Field optim_double(double nn::AdamWConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.optimizer.*member = to_double(k, v); },
          [member](const RunConfig& c) { return fmt(c.optimizer.*member); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"dataset", {[](RunConfig& c, std::string_view, std::string_view v) { c.dataset = std::string(v); },
                   [](const RunConfig& c) { return c.dataset.string(); }}},
      {"synth.attributes", synth_size(&data::SyntheticConfig::attributes)},
      {"synth.objects", synth_size(&data::SyntheticConfig::objects)},
      {"synth.dim", synth_size(&data::SyntheticConfig::dim)},
      {"synth.seen_fraction", synth_double(&data::SyntheticConfig::seen_fraction)},
      {"synth.attr_noise", synth_double(&data::SyntheticConfig::attr_noise)},
      {"synth.obj_noise", synth_double(&data::SyntheticConfig::obj_noise)},
      {"synth.leakage", synth_double(&data::SyntheticConfig::leakage)},
      {"synth.modality_gap", synth_double(&data::SyntheticConfig::modality_gap)},
      {"synth.train_per_pair", synth_size(&data::SyntheticConfig::train_per_pair)},
      {"synth.eval_per_pair", synth_size(&data::SyntheticConfig::eval_per_pair)},
      {"synth.multi_path",
       {[](RunConfig& c, std::string_view k, std::string_view v) { c.synthetic.multi_path = to_bool(k, v); },
        [](const RunConfig& c) { return std::string(c.synthetic.multi_path ? "true" : "false"); }}},
      {"flow_width", size_field(&RunConfig::flow_width)},
      {"flow_blocks", size_field(&RunConfig::flow_blocks)},
      {"flow_frequencies", size_field(&RunConfig::flow_frequencies)},
      {"composer_width", size_field(&RunConfig::composer_width)},
      {"composer_blocks", size_field(&RunConfig::composer_blocks)},
      {"lr", optim_double(&nn::AdamWConfig::lr)},
      {"beta1", optim_double(&nn::AdamWConfig::beta1)},
      {"beta2", optim_double(&nn::AdamWConfig::beta2)},
      {"eps", optim_double(&nn::AdamWConfig::eps)},
      {"weight_decay", optim_double(&nn::AdamWConfig::weight_decay)},
      {"flow_epochs", size_field(&RunConfig::flow_epochs)},
      {"composer_epochs", size_field(&RunConfig::composer_epochs)},
      {"batch_size", size_field(&RunConfig::batch_size)},
      {"joint", {[](RunConfig& c, std::string_view k, std::string_view v) { c.joint = to_bool(k, v); },
                 [](const RunConfig& c) { return std::string(c.joint ? "true" : "false"); }}},
      {"tau", double_field(&RunConfig::tau)},
      {"ce_weight", double_field(&RunConfig::ce_weight)},
      {"h", double_field(&RunConfig::h)},
      {"alpha", double_field(&RunConfig::alpha)},
      {"protocol",
       {[](RunConfig& c, std::string_view k, std::string_view v) {
          if (v == "closed") {
            c.protocol = czsl::Protocol::kClosed;
          } else if (v == "open") {
            c.protocol = czsl::Protocol::kOpen;
          } else {
            throw ConfigError(bad_value(k, v, "'closed' or 'open'"));
          }
        },
        [](const RunConfig& c) { return std::string(c.protocol == czsl::Protocol::kOpen ? "open" : "closed"); }}},
      {"thresholds", {[](RunConfig& c, std::string_view k, std::string_view v) { c.thresholds = to_list(k, v); },
                      [](const RunConfig& c) {
                        std::string s;
                        for (double t : c.thresholds) s += (s.empty() ? "" : ",") + fmt(t);
                        return s;
                      }}},
      {"split", {[](RunConfig& c, std::string_view, std::string_view v) { c.eval_split = data::parse_split(v); },
                 [](const RunConfig& c) { return std::string(data::split_name(c.eval_split)); }}},
      {"seed", {[](RunConfig& c, std::string_view k, std::string_view v) {
                  c.seed = to_u64(k, v);
                  c.synthetic.seed = c.seed;
                },
                [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"out", {[](RunConfig& c, std::string_view, std::string_view v) { c.out = std::string(v); },
               [](const RunConfig& c) { return c.out.string(); }}},
      {"threads", size_field(&RunConfig::threads)},
  };
  return table;
}

}  // namespace

RunConfig::RunConfig() : thresholds(czsl::default_threshold_grid()) {}

void RunConfig::validate(bool need_dataset) const {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(h > 0.0)) throw ConfigError("h must be positive");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
  if (!(ce_weight >= 0.0)) throw ConfigError("ce_weight must be non-negative");
  if (!(optimizer.lr > 0.0)) throw ConfigError("lr must be positive");
  if (!(optimizer.beta1 >= 0.0 && optimizer.beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(optimizer.beta2 >= 0.0 && optimizer.beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
  if (!(optimizer.eps > 0.0)) throw ConfigError("eps must be positive");
  if (!(optimizer.weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (flow_width == 0 || flow_frequencies == 0 || composer_width == 0) {
    throw ConfigError("network widths and frequency count must be positive");
  }
  if (threads == 0) throw ConfigError("threads must be at least 1");
  if (thresholds.empty()) throw ConfigError("thresholds must list at least one value");
  if (out.empty()) throw ConfigError("out must name a directory");
  if (dataset.empty()) {
    synthetic.validate();
  } else if (need_dataset && !std::filesystem::is_regular_file(dataset)) {
    throw ConfigError("dataset file not found: " + dataset.string());
  }
}

nn::VelocityNetConfig RunConfig::flow_config(std::size_t dim) const {
  return {dim, flow_width, flow_blocks, flow_frequencies};
}

nn::ComposerNetConfig RunConfig::composer_config(std::size_t dim) const {
  return {dim, composer_width, composer_blocks};
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " has no '=': " + std::string(line));
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second.set(config, key, value);
}

void apply_settings(RunConfig& config, const std::vector<std::pair<std::string, std::string>>& settings) {
  for (const auto& [k, v] : settings) apply_setting(config, k, v);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  RunConfig config;
  apply_settings(config, parse_key_values(text));
  return config;
}

std::string dump_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + "=" + field.get(config) + "\n";
  return out;
}

}  // namespace velocomp::pipeline
