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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unitax/concept_set.hpp"

namespace unitax {

/// A dataset-specific semantic class. Its meaning is the set of atomic
/// concepts it covers.
struct DatasetClass {
  std::string dataset;
  std::string name;
  ConceptSet extent;
};

/// The class list of one dataset. Classes are expected to be pairwise
/// disjoint; see validate_flat().
struct FlatTaxonomy {
  std::string name;
  std::vector<DatasetClass> classes;

  std::optional<std::size_t> find(std::string_view class_name) const;
  /// Throws ValidationError if absent.
  std::size_t index_of(std::string_view class_name) const;
};

enum class ClassRelation { Equal, SupersetOf, SubsetOf, Overlap, Disjoint };

std::string_view to_string(ClassRelation relation);

/// Relation of `a` to `b`. Throws InvalidClassError on empty input.
ClassRelation relate(const ConceptSet& a, const ConceptSet& b);

struct FlatViolation {
  enum class Kind { Overlap, DuplicateName, EmptyClass };
  Kind kind;
  std::size_t first;
  std::size_t second;  // equal to `first` for EmptyClass
  std::string message;
};

struct FlatReport {
  std::vector<FlatViolation> violations;
  bool ok() const { return violations.empty(); }
};

FlatReport validate_flat(const FlatTaxonomy& taxonomy);

/// Optional human name for a compiled class with a given extent.
struct ExtentName {
  ConceptSet extent;
  std::string name;
};

/// Everything a taxonomy input file holds.
struct TaxonomySet {
  ConceptUniverse universe;
  std::vector<FlatTaxonomy> datasets;
  std::vector<ExtentName> names;

  const FlatTaxonomy& dataset(std::string_view name) const;
};

struct UniversalClass {
  std::string name;
  ConceptSet extent;
};

/// Universal class indices for every class of one dataset, in class order.
struct DatasetMapping {
  std::string dataset;
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> targets;

  const std::vector<std::size_t>& at(std::string_view class_name) const;
};

/// Disjoint classes covering the union of all dataset classes, plus the map
/// from each dataset class to the universal classes it contains. Classes are
/// ordered by their lowest concept index.
struct UniversalTaxonomy {
  ConceptUniverse universe;
  std::vector<UniversalClass> classes;
  std::vector<DatasetMapping> mappings;

  const DatasetMapping& mapping(std::string_view dataset) const;
  std::optional<std::size_t> find(std::string_view class_name) const;

  /// The universal classes seen as a single flat taxonomy named `name`.
  FlatTaxonomy as_flat(std::string name = "universal") const;
};

enum class RewriteRule { Merge = 1, SplitSuperset = 2, SplitOverlap = 3 };

/// One application of a rewrite rule. `potential` is the total extent size of
/// the working multiset after the rewrite; it strictly decreases.
struct RewriteStep {
  RewriteRule rule;
  std::size_t first;
  std::size_t second;
  std::size_t working_size;
  std::size_t potential;
};

struct CompileResult {
  UniversalTaxonomy universal;
  std::vector<RewriteStep> steps;
  std::size_t initial_potential = 0;
};

/// Compiles the universal taxonomy by rewriting the multiset of all dataset
/// classes until its members are pairwise disjoint. Pairs are scanned in
/// working order; rule 1 (equal) is preferred over rule 2 (superset) over
/// rule 3 (overlap), and the scan restarts after every rewrite.
///
/// Throws ValidationError if any input is not a flat taxonomy or the list is
/// empty.
CompileResult compile_universal(const ConceptUniverse& universe,
                                std::span<const FlatTaxonomy> taxonomies);

UniversalTaxonomy build_universal(const ConceptUniverse& universe,
                                  std::span<const FlatTaxonomy> taxonomies);

/// Independent construction: groups covered concepts by the exact set of
/// dataset classes they belong to.
UniversalTaxonomy signature_partition(const ConceptUniverse& universe,
                                      std::span<const FlatTaxonomy> taxonomies);

/// Renames universal classes whose extent matches an entry of `names`.
void apply_names(UniversalTaxonomy& universal, std::span<const ExtentName> names);

/// Default name of a compiled class: its concept ids, sorted, joined by '+'.
std::string extent_name(const ConceptUniverse& universe, const ConceptSet& extent);

/// Violations of the universal-taxonomy properties, checked exhaustively:
/// disjointness, coverage, no partial overlap with any dataset class, and
/// exact mapping extents. Empty result means the taxonomy is valid.
std::vector<std::string> check_universal(const UniversalTaxonomy& universal,
                                         std::span<const FlatTaxonomy> taxonomies);

}  // namespace unitax
