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

#include "unitax/concept_set.hpp"

#include <algorithm>
#include <bit>

#include "unitax/error.hpp"

namespace unitax {

namespace {

constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

}  // namespace

ConceptUniverse::ConceptUniverse(std::vector<std::string> ids) : ids_(std::move(ids)) {
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i].empty()) {
      throw LoadError("concept universe: empty identifier at position " + std::to_string(i));
    }
    if (!index_.emplace(ids_[i], i).second) {
      throw LoadError("concept universe: duplicate identifier '" + ids_[i] + "'");
    }
  }
}

std::optional<std::size_t> ConceptUniverse::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ConceptSet::ConceptSet(std::size_t universe_size)
    : size_(universe_size), words_(word_count(universe_size), 0) {}

ConceptSet::ConceptSet(std::size_t universe_size, std::span<const std::size_t> members)
    : ConceptSet(universe_size) {
  for (std::size_t m : members) insert(m);
}

ConceptSet::ConceptSet(std::size_t universe_size, std::initializer_list<std::size_t> members)
    : ConceptSet(universe_size) {
  for (std::size_t m : members) insert(m);
}

void ConceptSet::insert(std::size_t index) {
  if (index >= size_) throw InvalidClassError("concept index out of range");
  words_[index / kWordBits] |= std::uint64_t{1} << (index % kWordBits);
}

void ConceptSet::erase(std::size_t index) {
  if (index >= size_) throw InvalidClassError("concept index out of range");
  words_[index / kWordBits] &= ~(std::uint64_t{1} << (index % kWordBits));
}

bool ConceptSet::contains(std::size_t index) const {
  if (index >= size_) return false;
  return (words_[index / kWordBits] >> (index % kWordBits)) & 1U;
}

std::size_t ConceptSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool ConceptSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
}

std::size_t ConceptSet::first() const {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) return i * kWordBits + static_cast<std::size_t>(std::countr_zero(words_[i]));
  }
  return size_;
}

std::vector<std::size_t> ConceptSet::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto w = words_[i];
    while (w != 0) {
      out.push_back(i * kWordBits + static_cast<std::size_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

void ConceptSet::check_compatible(const ConceptSet& other) const {
  if (size_ != other.size_) {
    throw InvalidClassError("concept sets belong to universes of different size");
  }
}

bool ConceptSet::intersects(const ConceptSet& other) const {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & other.words_[i]) return true;
  }
  return false;
}

bool ConceptSet::is_subset_of(const ConceptSet& other) const {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

ConceptSet& ConceptSet::operator&=(const ConceptSet& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

ConceptSet& ConceptSet::operator|=(const ConceptSet& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

ConceptSet& ConceptSet::operator-=(const ConceptSet& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

bool ConceptSet::operator<(const ConceptSet& other) const {
  if (size_ != other.size_) return size_ < other.size_;
  return words_ < other.words_;
}

std::size_t ConceptSet::hash() const {
  // FNV-1a over the words.
  std::uint64_t h = 1469598103934665603ULL ^ size_;
  for (auto w : words_) {
    h ^= w;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

ConceptSet make_concept_set(const ConceptUniverse& universe, std::span<const std::string> ids) {
  ConceptSet set(universe.size());
  for (const auto& id : ids) {
    auto index = universe.index_of(id);
    if (!index) throw LoadError("unknown concept '" + id + "'");
    set.insert(*index);
  }
  return set;
}

std::vector<std::string> concept_ids(const ConceptUniverse& universe, const ConceptSet& set) {
  std::vector<std::string> out;
  for (auto i : set.members()) out.push_back(universe.id(i));
  return out;
}

}  // namespace unitax
