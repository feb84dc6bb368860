// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/data/fceb.hpp"

#include <bit>
#include <cmath>

#include "velocomp/binary_io.hpp"
#include "velocomp/error.hpp"

namespace velocomp::data {
namespace {

constexpr std::string_view kMagic = "FCEB";

std::size_t branch_count(std::uint8_t mask) { return static_cast<std::size_t>(std::popcount(mask)); }

void write_rows(io::ByteWriter& w, const Tensor& t) {
  for (double v : t.values()) w.f32(static_cast<float>(v));
}

void write_vec(io::ByteWriter& w, const Vec& v) {
  for (double x : v) w.f32(static_cast<float>(x));
}

double read_value(io::ByteReader& r) {
  const std::size_t at = r.offset();
  const float v = r.f32();
  if (!std::isfinite(v)) {
    throw DataError(r.context() + ": non-finite value (" + std::string(std::isnan(v) ? "NaN" : "inf") +
                    ") at offset " + std::to_string(at));
  }
  return v;
}

Tensor read_rows(io::ByteReader& r, std::size_t rows, std::size_t dim) {
  Tensor t({rows, dim}, 0.0);
  for (double& v : t.values()) v = read_value(r);
  return t;
}

Vec read_vec(io::ByteReader& r, std::size_t dim) {
  Vec v(dim);
  for (double& x : v) x = read_value(r);
  return v;
}

std::vector<Pair> read_pairs(io::ByteReader& r) {
  const std::uint32_t count = r.u32();
  if (static_cast<std::size_t>(count) * 8 > r.remaining()) {
    throw FormatError(r.context() + ": pair table of " + std::to_string(count) + " entries exceeds the file");
  }
  std::vector<Pair> out(count);
  for (auto& p : out) {
    p.attr = r.u32();
    p.obj = r.u32();
  }
  return out;
}

}  // namespace

std::size_t encoded_size(std::size_t dim, std::size_t m, std::size_t n, std::size_t comp_rows,
                         std::size_t seen, std::size_t unseen, std::uint8_t branch_mask, std::size_t samples) {
  const std::size_t header = 4 + 4 * 5;
  const std::size_t tables = 4 + 8 * seen + 4 + 8 * unseen;
  const std::size_t text = 4 * dim * (m + n + comp_rows);
  const std::size_t per_sample = 4 + 4 + 1 + 4 * dim * branch_count(branch_mask);
  return header + tables + 1 + text + 4 + samples * per_sample;
}

std::string encode_dataset(const EmbeddingDataset& ds) {
  ds.validate();
  io::ByteWriter w;
  w.bytes(kMagic);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(ds.dim));
  w.u32(static_cast<std::uint32_t>(ds.label_space.attribute_count()));
  w.u32(static_cast<std::uint32_t>(ds.label_space.object_count()));
  w.u32(static_cast<std::uint32_t>(ds.comp_pairs.size()));
  for (const auto* table : {&ds.label_space.seen(), &ds.label_space.unseen()}) {
    w.u32(static_cast<std::uint32_t>(table->size()));
    for (Pair p : *table) {
      w.u32(p.attr);
      w.u32(p.obj);
    }
  }
  w.u8(ds.branch_mask);
  write_rows(w, ds.attr_text.embeddings());
  write_rows(w, ds.obj_text.embeddings());
  write_rows(w, ds.comp_text.embeddings());
  w.u32(static_cast<std::uint32_t>(ds.samples.size()));
  for (const Sample& s : ds.samples) {
    w.u32(s.attr);
    w.u32(s.obj);
    w.u8(static_cast<std::uint8_t>(s.split));
    if (ds.branch_mask & kAttrBit) write_vec(w, s.attr_feature);
    if (ds.branch_mask & kObjBit) write_vec(w, s.obj_feature);
    if (ds.branch_mask & kCompBit) write_vec(w, s.comp_feature);
  }
  return w.take();
}

EmbeddingDataset decode_dataset(std::string_view bytes, const std::string& context) {
  io::ByteReader r(bytes, context);
  if (r.bytes(4) != kMagic) throw FormatError(context + ": bad magic, expected FCEB");
  const std::uint32_t version = r.u32();
  if (version != kDatasetVersion) throw FormatError(context + ": unsupported version " + std::to_string(version));
  const std::size_t dim = r.u32(), m = r.u32(), n = r.u32(), comp_rows = r.u32();
  if (dim == 0) throw FormatError(context + ": embedding dim is zero");
  std::vector<Pair> seen = read_pairs(r);
  std::vector<Pair> unseen = read_pairs(r);
  const std::uint8_t mask = r.u8();
  if (mask != kSinglePath && mask != kMultiPath) {
    throw FormatError(context + ": branch mask " + std::to_string(mask) + " is neither single-path (4) nor multi-path (7)");
  }
  czsl::LabelSpace space(attribute_labels(m), object_labels(n), std::move(seen), std::move(unseen));
  const std::size_t listed = space.seen().size() + space.unseen().size();
  if (comp_rows != listed && comp_rows != m * n) {
    throw FormatError(context + ": composition count " + std::to_string(comp_rows) +
                      " must equal seen+unseen or M*N");
  }
  // Size checks before bulk allocation so a corrupt header cannot request
  // gigabytes.
  if (4 * dim * (m + n + comp_rows) > r.remaining()) throw FormatError(context + ": text blocks exceed the file");
  Tensor attr_text = read_rows(r, m, dim);
  Tensor obj_text = read_rows(r, n, dim);
  Tensor comp_text = read_rows(r, comp_rows, dim);
  const std::size_t count = r.u32();
  const std::size_t per_sample = 9 + 4 * dim * branch_count(mask);
  if (r.remaining() != count * per_sample) {
    throw FormatError(context + ": sample block is " + std::to_string(r.remaining()) + " bytes, header implies " +
                      std::to_string(count * per_sample));
  }
  std::vector<Sample> samples(count);
  for (Sample& s : samples) {
    s.attr = r.u32();
    s.obj = r.u32();
    const std::uint8_t split = r.u8();
    if (split > 2) throw FormatError(context + ": split tag " + std::to_string(split) + " at offset " + std::to_string(r.offset() - 1));
    s.split = static_cast<Split>(split);
    if (mask & kAttrBit) s.attr_feature = read_vec(r, dim);
    if (mask & kObjBit) s.obj_feature = read_vec(r, dim);
    if (mask & kCompBit) s.comp_feature = read_vec(r, dim);
  }
  return make_dataset(std::move(space), std::move(attr_text), std::move(obj_text), std::move(comp_text),
                      comp_rows == m * n, mask, std::move(samples));
}

void save_dataset(const EmbeddingDataset& ds, const std::filesystem::path& path) {
  io::write_file(path, encode_dataset(ds));
}

EmbeddingDataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(io::read_file(path), path.string());
}

}  // namespace velocomp::data
