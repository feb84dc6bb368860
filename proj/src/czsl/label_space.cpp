// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#include "velocomp/czsl/label_space.hpp"

#include "velocomp/error.hpp"

namespace velocomp::czsl {

LabelSpace::LabelSpace(std::vector<std::string> attributes, std::vector<std::string> objects,
                       std::vector<Pair> seen, std::vector<Pair> unseen)
    : attributes_(std::move(attributes)),
      objects_(std::move(objects)),
      seen_(std::move(seen)),
      unseen_(std::move(unseen)),
      status_(attributes_.size() * objects_.size(), 0) {
  auto mark = [&](const std::vector<Pair>& pairs, std::uint8_t tag, const char* what) {
    for (Pair p : pairs) {
      if (!valid(p)) {
        throw DataError(std::string(what) + " pair (" + std::to_string(p.attr) + ", " +
                        std::to_string(p.obj) + ") is out of range");
      }
      std::uint8_t& s = status_[p.attr * objects_.size() + p.obj];
      if (s == tag) throw DataError(std::string(what) + " pair listed twice");
      if (s != 0) throw DataError("pair (" + std::to_string(p.attr) + ", " + std::to_string(p.obj) +
                                  ") is both seen and unseen");
      s = tag;
    }
  };
  mark(seen_, 1, "seen");
  mark(unseen_, 2, "unseen");
}

bool LabelSpace::is_seen(Pair p) const {
  return valid(p) && status_[p.attr * objects_.size() + p.obj] == 1;
}

bool LabelSpace::is_unseen(Pair p) const {
  return valid(p) && status_[p.attr * objects_.size() + p.obj] == 2;
}

std::vector<Pair> LabelSpace::test_pairs(Protocol protocol) const {
  std::vector<Pair> out;
  if (protocol == Protocol::kClosed) {
    out = seen_;
    out.insert(out.end(), unseen_.begin(), unseen_.end());
    return out;
  }
  out.reserve(attributes_.size() * objects_.size());
  for (std::uint32_t a = 0; a < attributes_.size(); ++a)
    for (std::uint32_t o = 0; o < objects_.size(); ++o) out.push_back({a, o});
  return out;
}

}  // namespace velocomp::czsl
