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
#include <vector>

#include "unitax/label_spaces.hpp"
#include "unitax/taxonomy_io.hpp"

namespace unitax {

/// Counts over (true class, predicted class) with one extra predicted column
/// for void. Void predictions are false negatives of the true class and never
/// false positives of anything.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes);

  std::size_t num_classes() const { return n_; }
  std::size_t void_index() const { return n_; }

  /// `predicted` may be void_index(). Throws ShapeError when out of range.
  void update(std::size_t truth, std::size_t predicted);
  /// Cell-wise sum; shapes must match.
  void merge(const ConfusionMatrix& other);

  std::uint64_t count(std::size_t truth, std::size_t predicted) const;
  std::uint64_t total() const { return total_; }

  std::uint64_t true_positives(std::size_t c) const;
  std::uint64_t false_positives(std::size_t c) const;
  /// Includes void predictions for true class c.
  std::uint64_t false_negatives(std::size_t c) const;

  /// TP / (TP + FP + FN); nullopt when the class is neither present nor
  /// predicted.
  std::optional<double> iou(std::size_t c) const;
  /// Mean over defined classes. Throws DegenerateInputError if none is.
  double miou() const;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> cells_;  // n_ x (n_ + 1)
  std::uint64_t total_ = 0;
};

struct MetricsReport {
  std::vector<std::string> class_names;
  std::vector<std::optional<double>> iou;
  double miou = 0.0;
  std::uint64_t samples = 0;
  std::vector<std::uint64_t> support;  // ground-truth count per class
  std::vector<std::string> undefined;

  Json to_json() const;
};

MetricsReport make_report(const ConfusionMatrix& cm, std::vector<std::string> class_names);

/// Scores per-sample training-class probabilities on an evaluation taxonomy:
/// each prediction is mapped through the matrix, renormalized and argmaxed;
/// the void row counts as a void prediction. `truth` holds evaluation class
/// indices (rows excluding void).
MetricsReport cross_eval(std::span<const std::vector<double>> probabilities,
                         std::span<const std::size_t> truth, const MappingMatrix& eval_matrix);

}  // namespace unitax
