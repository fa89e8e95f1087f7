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
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "unitax/label_spaces.hpp"
#include "unitax/loss.hpp"
#include "unitax/metrics.hpp"
#include "unitax/taxonomy.hpp"
#include "unitax/taxonomy_io.hpp"

namespace unitax {

/// Seed of the named sub-stream `stream` (and optional index) derived from
/// the root seed. All randomness in the trainer flows through this.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index = 0);

/// Gaussian clusters, one per hidden class; each dataset labels them through
/// its own flat taxonomy over the hidden classes.
struct SyntheticSpec {
  ConceptUniverse classes;
  std::vector<std::vector<double>> means;
  double sigma = 0.3;
  std::vector<FlatTaxonomy> datasets;
  std::size_t samples_per_dataset = 1000;
  std::size_t test_samples_per_class = 200;
  std::uint64_t seed = 0;

  std::size_t feature_dim() const { return means.empty() ? 0 : means.front().size(); }
  /// One class per hidden class; the taxonomy test labels are expressed in.
  FlatTaxonomy truth_taxonomy() const;
};

/// Reads a spec file: the taxonomy input schema with the hidden classes as
/// the universe, plus
///   "synthetic": {"sigma": 0.3, "separation": 1.8 | "means": [[...], ...],
///                 "samples_per_dataset": 1000, "test_samples_per_class": 200}
/// Means default to corner_means(n, separation). The seed is not part of the
/// file. Throws LoadError or ValidationError.
SyntheticSpec synthetic_spec_from_json(const Json& doc, std::string_view source = "<input>");

/// Means at the scaled one-hot corners of R^n, spaced `separation` apart.
std::vector<std::vector<double>> corner_means(std::size_t n, double separation);

/// Throws ValidationError: mismatched shapes, non-positive sigma, repeated
/// means, datasets that are not flat taxonomies over `classes`.
void validate_spec(const SyntheticSpec& spec);

struct LabeledSample {
  std::vector<double> features;
  std::size_t dataset = 0;  ///< index into SyntheticSpec::datasets
  std::size_t label = 0;    ///< class index within that dataset
  std::size_t hidden = 0;   ///< true hidden class; metrics only
};

/// Training samples, dataset by dataset. Every hidden class covered by a
/// dataset receives the same number of samples (up to one). Throws
/// DegenerateInputError when some covered class would get none.
std::vector<LabeledSample> generate(const SyntheticSpec& spec);

/// Held-out samples labeled by hidden class (dataset 0 of the truth taxonomy).
std::vector<LabeledSample> generate_test(const SyntheticSpec& spec);

class LinearSoftmaxModel {
 public:
  LinearSoftmaxModel() = default;
  LinearSoftmaxModel(std::size_t num_classes, std::size_t num_features);

  /// Weights ~ N(0, scale^2), biases zero.
  void initialize(std::uint64_t seed, double scale);

  std::size_t num_classes() const { return classes_; }
  std::size_t num_features() const { return features_; }

  std::vector<double> logits(std::span<const double> x) const;
  std::vector<double> probabilities(std::span<const double> x) const;

  /// Row-major weights (classes x features) followed by the biases.
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  /// Accumulates d loss / d parameters for one sample into `grad`.
  void accumulate_gradient(std::span<const double> x, std::span<const double> dlogits,
                           std::span<double> grad) const;

 private:
  std::size_t classes_ = 0;
  std::size_t features_ = 0;
  std::vector<double> params_;
};

/// lr_min + (lr_max - lr_min) * (1 + cos(pi * step / total)) / 2.
/// Throws ValidationError for lr_min > lr_max or step outside [0, total].
double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min);

struct AdamConfig {
  double lr_max = 5e-4;
  double lr_min = 6e-6;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moments and step count for a flat parameter vector.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t num_parameters, AdamConfig config = {});

  void step(std::span<double> params, std::span<const double> grad, double lr);

  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

/// Draws each epoch so that every dataset contributes the same number of
/// samples regardless of its size. Within a dataset, samples are visited in
/// reshuffled passes.
class BalancedSampler {
 public:
  BalancedSampler(std::span<const std::size_t> sample_datasets, std::size_t batch_size, std::uint64_t seed);

  /// Batches of sample indices for the next epoch; an epoch has as many
  /// draws as there are samples.
  std::vector<std::vector<std::size_t>> next_epoch();

  /// True when batch_size is smaller than the number of datasets.
  bool undersized_batches() const { return batch_size_ < pools_.size(); }

 private:
  struct Pool {
    std::vector<std::size_t> members;
    std::size_t cursor = 0;
  };
  std::size_t draw(Pool& pool);

  std::vector<Pool> pools_;
  std::size_t total_ = 0;
  std::size_t batch_size_;
  std::mt19937_64 rng_;
};

/// First epoch of a BalancedSampler.
std::vector<std::vector<std::size_t>> balanced_batches(std::span<const LabeledSample> samples,
                                                       std::size_t batch_size, std::uint64_t seed);

struct TrainConfig {
  LossConfig loss{LossVariant::NLLPlus, 0.0, 1.0, AlphaMode::Constant, false};
  AdamConfig adam;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double init_scale = 0.01;
  std::uint64_t seed = 0;
};

struct TrainResult {
  LinearSoftmaxModel model;
  /// Mean batch loss per epoch.
  std::vector<double> loss_trace;
  /// Samples left out because the loss variant cannot use their label set
  /// (aggregate labels under plain NLL).
  std::size_t excluded_samples = 0;
};

/// Loss samples for `samples` under the taxonomy's train mapping.
std::vector<LossSample> make_loss_samples(const LinearSoftmaxModel& model,
                                          std::span<const LabeledSample> samples,
                                          std::span<const std::size_t> batch,
                                          const TrainingTaxonomy& taxonomy);

/// Mean loss over `batch` and its gradient w.r.t. the model parameters.
/// NaN when the model produces a non-finite logit.
double model_loss_and_gradient(const LinearSoftmaxModel& model, std::span<const LabeledSample> samples,
                               std::span<const std::size_t> batch, const TrainingTaxonomy& taxonomy,
                               const LossConfig& config, std::vector<double>& grad);

/// Trains a fresh model over the taxonomy's classes. Sample dataset indices
/// refer to taxonomy.datasets. Throws DivergenceError on a non-finite loss.
TrainResult train(std::span<const LabeledSample> samples, const TrainingTaxonomy& taxonomy,
                  const TrainConfig& config);

/// Softmax outputs for every sample.
std::vector<std::vector<double>> predict(const LinearSoftmaxModel& model, std::span<const LabeledSample> samples);

/// Evaluates on samples labeled by hidden class against the truth taxonomy.
MetricsReport evaluate(const LinearSoftmaxModel& model, std::span<const LabeledSample> test,
                       const TrainingTaxonomy& taxonomy, const FlatTaxonomy& truth);

}  // namespace unitax
