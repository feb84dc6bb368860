// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/nn/checkpoint.hpp"

#include <map>

#include "velocomp/binary_io.hpp"
#include "velocomp/error.hpp"

namespace velocomp::nn {
namespace {

constexpr std::string_view kMagic = "FCNN";

}  // namespace

std::string encode_checkpoint(const std::vector<NamedTensor>& tensors) {
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  for (const auto& t : tensors) {
    w.u32(static_cast<std::uint32_t>(t.name.size()));
    w.bytes(t.name);
    w.u32(static_cast<std::uint32_t>(t.value.rank()));
    for (std::size_t d : t.value.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (double v : t.value.values()) w.f64(v);
  }
  return w.take();
}

std::vector<NamedTensor> decode_checkpoint(const std::string& bytes) {
  io::ByteReader r(bytes, "checkpoint");
  if (r.bytes(4) != kMagic) throw FormatError("checkpoint: bad magic (expected FCNN)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  std::vector<NamedTensor> out;
  while (!r.at_end()) {
    NamedTensor t;
    const std::uint32_t name_len = r.u32();
    t.name = std::string(r.bytes(name_len));
    const std::uint32_t rank = r.u32();
    std::vector<std::size_t> shape(rank);
    std::size_t count = 1;
    for (auto& d : shape) {
      d = r.u32();
      count *= d;
    }
    if (count * 8 > r.remaining()) {
      throw FormatError("checkpoint: truncated payload for " + t.name + " at offset " +
                        std::to_string(r.offset()));
    }
    std::vector<double> data(count);
    for (double& v : data) v = r.f64();
    t.value = Tensor(std::move(shape), std::move(data));
    out.push_back(std::move(t));
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const ParameterList& params) {
  std::vector<NamedTensor> tensors;
  tensors.reserve(params.size());
  for (const Parameter* p : params) tensors.push_back({p->name, p->value});
  io::write_file(path, encode_checkpoint(tensors));
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void assign_parameters(const ParameterList& params, const std::vector<NamedTensor>& tensors) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t.value;
  for (Parameter* p : params) {
    auto it = by_name.find(p->name);
    if (it == by_name.end()) throw CheckpointError("checkpoint lacks parameter " + p->name);
    if (!it->second->same_shape(p->value)) {
      throw CheckpointError("checkpoint parameter " + p->name + " has shape " +
                            it->second->shape_string() + ", expected " + p->value.shape_string());
    }
    p->value = *it->second;
    p->grad = Tensor(p->value.shape(), 0.0);
  }
  if (by_name.size() != params.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(by_name.size()) +
                          " tensors, network expects " + std::to_string(params.size()));
  }
}

}  // namespace velocomp::nn
