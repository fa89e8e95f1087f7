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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unitax/taxonomy.hpp"
#include "unitax/taxonomy_io.hpp"

namespace unitax {

enum class TaxonomyKind { NaiveConcat, PartialMerge, Universal };

std::string_view to_string(TaxonomyKind kind);
/// Accepts "naive", "merge" and "universal"; throws ValidationError otherwise.
TaxonomyKind parse_taxonomy_kind(std::string_view text);

struct TrainingClass {
  std::string name;
  ConceptSet extent;
};

/// The label space a model is trained on. Baseline kinds may contain
/// overlapping classes; the universal kind never does.
struct TrainingTaxonomy {
  TaxonomyKind kind = TaxonomyKind::Universal;
  ConceptUniverse universe;
  std::vector<TrainingClass> classes;
  std::vector<FlatTaxonomy> datasets;
  /// train_mapping[d][c]: training classes that are correct for class c of
  /// dataset d. Sorted ascending.
  std::vector<std::vector<std::vector<std::size_t>>> train_mapping;

  std::size_t size() const { return classes.size(); }
  std::size_t dataset_index(std::string_view name) const;
  const std::vector<std::size_t>& label_set(std::size_t dataset, std::size_t dataset_class) const;
};

/// One training class per dataset class, named "<dataset>-<class>".
TrainingTaxonomy build_naive_concat(const ConceptUniverse& universe,
                                    std::span<const FlatTaxonomy> taxonomies);

/// Naive concatenation where classes with equal extents are merged into one.
/// A merged class keeps the bare class name when all members share it, else
/// the prefixed name of its first member.
TrainingTaxonomy build_partial_merge(const ConceptUniverse& universe,
                                     std::span<const FlatTaxonomy> taxonomies);

TrainingTaxonomy build_universal_training(const UniversalTaxonomy& universal,
                                          std::span<const FlatTaxonomy> taxonomies);

/// Dispatches on kind; the universal kind is compiled by build_universal().
TrainingTaxonomy build_training_taxonomy(TaxonomyKind kind, const ConceptUniverse& universe,
                                         std::span<const FlatTaxonomy> taxonomies);

/// Binary dataset-class x training-class matrix. Evaluation matrices carry a
/// trailing void row.
class MappingMatrix {
 public:
  MappingMatrix() = default;
  MappingMatrix(std::vector<std::string> row_names, std::vector<std::string> col_names, bool has_void);

  std::size_t rows() const { return row_names_.size(); }
  std::size_t cols() const { return col_names_.size(); }
  bool has_void() const { return has_void_; }
  /// Index of the void row; only meaningful when has_void().
  std::size_t void_row() const { return rows() - 1; }

  bool at(std::size_t r, std::size_t c) const { return cells_[r * cols() + c] != 0; }
  void set(std::size_t r, std::size_t c, bool value = true) { cells_[r * cols() + c] = value ? 1 : 0; }

  std::size_t row_sum(std::size_t r) const;
  std::size_t column_sum(std::size_t c) const;

  const std::vector<std::string>& row_names() const { return row_names_; }
  const std::vector<std::string>& col_names() const { return col_names_; }

  Json to_json() const;
  /// Bare 0/1 grid, one line per row.
  std::string to_csv() const;

 private:
  std::vector<std::string> row_names_;
  std::vector<std::string> col_names_;
  std::vector<std::uint8_t> cells_;
  bool has_void_ = false;
};

/// Row per class of `dataset`, 1 where the training class is in its
/// train mapping. Throws ValidationError for unknown datasets.
MappingMatrix training_matrix(const TrainingTaxonomy& taxonomy, std::string_view dataset);

/// Evaluation rows: each class of `eval` maps to every training class it
/// overlaps; the trailing void row takes the training classes that overlap
/// none of them.
MappingMatrix eval_mapping(const TrainingTaxonomy& taxonomy, const FlatTaxonomy& eval);

using ScoreVector = std::vector<double>;

/// score[r] = sum of p[t] over the training classes of row r.
/// Throws ShapeError on a size mismatch and ValidationError when `p` is not a
/// probability vector (negative entry or |sum - 1| > 1e-9).
ScoreVector dataset_scores(std::span<const double> p, const MappingMatrix& m);

/// Throws DegenerateInputError when no score is positive.
ScoreVector renormalize(std::span<const double> scores);

/// Argmax of the renormalized scores, lowest index on ties. The void row is
/// a valid answer.
std::size_t predict_dataset_class(std::span<const double> p, const MappingMatrix& m);

}  // namespace unitax
