// Copyright 2026 The unitax Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unitax {

/// Ordered list of atomic concept identifiers. The position of a concept in
/// this list is its bit index in every ConceptSet built over the universe.
class ConceptUniverse {
 public:
  ConceptUniverse() = default;
  /// Throws LoadError on empty or duplicate identifiers.
  explicit ConceptUniverse(std::vector<std::string> ids);

  std::size_t size() const { return ids_.size(); }
  const std::string& id(std::size_t index) const { return ids_.at(index); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  bool operator==(const ConceptUniverse& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Fixed-width bitset over the indices of a ConceptUniverse.
class ConceptSet {
 public:
  ConceptSet() = default;
  explicit ConceptSet(std::size_t universe_size);
  ConceptSet(std::size_t universe_size, std::span<const std::size_t> members);
  ConceptSet(std::size_t universe_size, std::initializer_list<std::size_t> members);

  std::size_t universe_size() const { return size_; }

  void insert(std::size_t index);
  void erase(std::size_t index);
  bool contains(std::size_t index) const;

  std::size_t count() const;
  bool empty() const;

  /// Lowest member index; size of the universe when the set is empty.
  std::size_t first() const;
  std::vector<std::size_t> members() const;

  bool intersects(const ConceptSet& other) const;
  bool disjoint(const ConceptSet& other) const { return !intersects(other); }
  bool is_subset_of(const ConceptSet& other) const;

  ConceptSet& operator&=(const ConceptSet& other);
  ConceptSet& operator|=(const ConceptSet& other);
  ConceptSet& operator-=(const ConceptSet& other);

  friend ConceptSet operator&(ConceptSet a, const ConceptSet& b) { return a &= b; }
  friend ConceptSet operator|(ConceptSet a, const ConceptSet& b) { return a |= b; }
  friend ConceptSet operator-(ConceptSet a, const ConceptSet& b) { return a -= b; }

  bool operator==(const ConceptSet& other) const = default;
  /// Strict weak order (by universe size, then words); used for map keys only.
  bool operator<(const ConceptSet& other) const;

  std::size_t hash() const;

 private:
  void check_compatible(const ConceptSet& other) const;

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Builds a ConceptSet from concept identifiers; throws LoadError naming the
/// first unknown identifier.
ConceptSet make_concept_set(const ConceptUniverse& universe,
                            std::span<const std::string> ids);

/// Concept identifiers of a set, in universe order.
std::vector<std::string> concept_ids(const ConceptUniverse& universe, const ConceptSet& set);

struct ConceptSetHash {
  std::size_t operator()(const ConceptSet& s) const { return s.hash(); }
};

}  // namespace unitax
