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
#include <string>
#include <vector>

#include "unitax/trainer.hpp"

namespace unitax {

// Two splits of the same hidden classes. Split A aggregates car, bus and
// truck into "four-wheels-vehicle"; split B aggregates car, motorcycle and
// bicycle into "personal-vehicle". Car is never labeled on its own.

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::size_t background_classes = 6;
  /// Distance between cluster means in units of sigma.
  double separation = 6.0;
  double sigma = 0.3;
  std::size_t samples_per_split = 2000;
  std::size_t test_samples_per_class = 300;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  AdamConfig adam;
  /// Modulation exponent used by every model; 0 gives the plain variants.
  double gamma = 0.0;
};

/// The synthetic two-split spec for `config`.
SyntheticSpec unlabeled_concept_spec(const ExperimentConfig& config);

/// Names of the hidden classes reported in the table, in column order.
const std::vector<std::string>& vehicle_classes();

struct ModelVariant {
  std::string name;
  TaxonomyKind kind;
  LossVariant loss;
  bool oracle = false;  ///< trains on hidden-class labels
};

/// The six compared models, in table order.
const std::vector<ModelVariant>& experiment_variants();

struct ExperimentRow {
  ModelVariant variant;
  MetricsReport metrics;
  std::size_t logits = 0;
  std::size_t excluded_samples = 0;
  double final_loss = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::string> class_names;
  std::vector<ExperimentRow> rows;

  const ExperimentRow& row(std::string_view name) const;
  /// IoU of a hidden class for a model; 0 when undefined.
  double iou(std::string_view model, std::string_view cls) const;

  Json to_json() const;
  /// Fixed-width table: vehicle IoUs and mIoU in percent, one row per model.
  std::string to_table() const;
};

/// Trains and evaluates the models named in `only` (all six when empty).
ExperimentReport run_unlabeled_concept_experiment(const ExperimentConfig& config,
                                                  const std::vector<std::string>& only = {});

}  // namespace unitax
