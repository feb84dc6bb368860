// Copyright 2026 The velocomp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace velocomp::czsl {

struct Pair {
  std::uint32_t attr = 0;
  std::uint32_t obj = 0;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

enum class Protocol { kClosed, kOpen };

// Attribute and object vocabularies plus the disjoint seen/unseen partition
// of their Cartesian product.
class LabelSpace {
 public:
  LabelSpace() = default;
  // Throws DataError on overlap, out-of-range indices or duplicates.
  LabelSpace(std::vector<std::string> attributes, std::vector<std::string> objects,
             std::vector<Pair> seen, std::vector<Pair> unseen);

  std::size_t attribute_count() const { return attributes_.size(); }
  std::size_t object_count() const { return objects_.size(); }
  const std::vector<std::string>& attributes() const { return attributes_; }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::vector<Pair>& seen() const { return seen_; }
  const std::vector<Pair>& unseen() const { return unseen_; }

  bool is_seen(Pair p) const;
  bool is_unseen(Pair p) const;
  bool contains(Pair p) const { return is_seen(p) || is_unseen(p); }
  bool valid(Pair p) const { return p.attr < attributes_.size() && p.obj < objects_.size(); }

  // Closed world: seen then unseen pairs in table order. Open world: the full
  // product in row-major (attr * N + obj) order.
  std::vector<Pair> test_pairs(Protocol protocol) const;

 private:
  std::vector<std::string> attributes_;
  std::vector<std::string> objects_;
  std::vector<Pair> seen_;
  std::vector<Pair> unseen_;
  std::vector<std::uint8_t> status_;  // 0 none, 1 seen, 2 unseen; row-major
};

}  // namespace velocomp::czsl
