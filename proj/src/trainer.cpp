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

#include "unitax/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "unitax/error.hpp"

namespace unitax {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t index) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : stream) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return splitmix64(splitmix64(root ^ h) + index);
}

FlatTaxonomy SyntheticSpec::truth_taxonomy() const {
  FlatTaxonomy truth{"truth", {}};
  for (std::size_t c = 0; c < classes.size(); ++c) {
    truth.classes.push_back({truth.name, classes.id(c), ConceptSet(classes.size(), {c})});
  }
  return truth;
}

std::vector<std::vector<double>> corner_means(std::size_t n, double separation) {
  const double scale = separation / std::numbers::sqrt2;
  std::vector<std::vector<double>> means(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) means[i][i] = scale;
  return means;
}

SyntheticSpec synthetic_spec_from_json(const Json& doc, std::string_view source) {
  const std::string where(source);
  auto set = taxonomy_from_json(doc, source);
  SyntheticSpec spec;
  spec.classes = set.universe;
  spec.datasets = std::move(set.datasets);
  if (!doc.contains("synthetic") || !doc.at("synthetic").is_object()) {
    throw LoadError(where + ": missing \"synthetic\" section");
  }
  const auto& syn = doc.at("synthetic");
  try {
    spec.sigma = syn.value("sigma", spec.sigma);
    spec.samples_per_dataset = syn.value("samples_per_dataset", spec.samples_per_dataset);
    spec.test_samples_per_class = syn.value("test_samples_per_class", spec.test_samples_per_class);
    if (syn.contains("means")) {
      spec.means = syn.at("means").get<std::vector<std::vector<double>>>();
    } else {
      spec.means = corner_means(spec.classes.size(), syn.value("separation", 6.0 * spec.sigma));
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(where + ": synthetic: " + e.what());
  }
  validate_spec(spec);
  return spec;
}

void validate_spec(const SyntheticSpec& spec) {
  const std::size_t n = spec.classes.size();
  if (n == 0) throw ValidationError("synthetic spec: no classes");
  if (spec.means.size() != n) throw ValidationError("synthetic spec: need one mean per class");
  for (const auto& m : spec.means) {
    if (m.size() != spec.feature_dim() || m.empty()) {
      throw ValidationError("synthetic spec: means must share one non-zero dimension");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (spec.means[i] == spec.means[j]) throw ValidationError("synthetic spec: repeated class mean");
    }
  }
  if (!(spec.sigma > 0.0)) throw ValidationError("synthetic spec: sigma must be positive");
  if (spec.datasets.empty()) throw ValidationError("synthetic spec: no datasets");
  for (const auto& d : spec.datasets) {
    auto report = validate_flat(d);
    if (!report.ok()) throw ValidationError(report.violations.front().message);
    for (const auto& c : d.classes) {
      if (c.extent.universe_size() != n) {
        throw ValidationError("synthetic spec: dataset '" + d.name + "' is not over the hidden classes");
      }
    }
  }
}

namespace {

std::vector<double> draw_features(const SyntheticSpec& spec, std::size_t cls, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::vector<double> x = spec.means[cls];
  for (double& v : x) v += noise(rng);
  return x;
}

}  // namespace

std::vector<LabeledSample> generate(const SyntheticSpec& spec) {
  validate_spec(spec);
  std::vector<LabeledSample> out;
  for (std::size_t d = 0; d < spec.datasets.size(); ++d) {
    const auto& taxonomy = spec.datasets[d];
    // hidden class -> dataset label
    std::vector<std::pair<std::size_t, std::size_t>> covered;
    for (std::size_t h = 0; h < spec.classes.size(); ++h) {
      for (std::size_t c = 0; c < taxonomy.classes.size(); ++c) {
        if (taxonomy.classes[c].extent.contains(h)) covered.emplace_back(h, c);
      }
    }
    if (covered.empty() || spec.samples_per_dataset < covered.size()) {
      throw DegenerateInputError("synthetic spec: dataset '" + taxonomy.name +
                                 "' would leave a class without samples");
    }
    std::mt19937_64 rng(derive_seed(spec.seed, "generate", d));
    std::vector<std::size_t> order(spec.samples_per_dataset);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i % covered.size();
    std::shuffle(order.begin(), order.end(), rng);
    for (auto k : order) {
      const auto [hidden, label] = covered[k];
      out.push_back({draw_features(spec, hidden, rng), d, label, hidden});
    }
  }
  return out;
}

std::vector<LabeledSample> generate_test(const SyntheticSpec& spec) {
  validate_spec(spec);
  if (spec.test_samples_per_class == 0) throw DegenerateInputError("synthetic spec: no test samples requested");
  std::mt19937_64 rng(derive_seed(spec.seed, "test"));
  std::vector<LabeledSample> out;
  for (std::size_t h = 0; h < spec.classes.size(); ++h) {
    for (std::size_t i = 0; i < spec.test_samples_per_class; ++i) {
      out.push_back({draw_features(spec, h, rng), 0, h, h});
    }
  }
  return out;
}

LinearSoftmaxModel::LinearSoftmaxModel(std::size_t num_classes, std::size_t num_features)
    : classes_(num_classes), features_(num_features), params_(num_classes * (num_features + 1), 0.0) {}

void LinearSoftmaxModel::initialize(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  for (std::size_t i = 0; i < classes_ * features_; ++i) params_[i] = scale > 0.0 ? dist(rng) : 0.0;
  std::fill(params_.begin() + static_cast<std::ptrdiff_t>(classes_ * features_), params_.end(), 0.0);
}

std::vector<double> LinearSoftmaxModel::logits(std::span<const double> x) const {
  if (x.size() != features_) throw ShapeError("model: feature dimension mismatch");
  std::vector<double> s(classes_);
  const double* bias = params_.data() + classes_ * features_;
  for (std::size_t k = 0; k < classes_; ++k) {
    const double* w = params_.data() + k * features_;
    double acc = bias[k];
    for (std::size_t j = 0; j < features_; ++j) acc += w[j] * x[j];
    s[k] = acc;
  }
  return s;
}

std::vector<double> LinearSoftmaxModel::probabilities(std::span<const double> x) const {
  return softmax(logits(x));
}

void LinearSoftmaxModel::accumulate_gradient(std::span<const double> x, std::span<const double> dlogits,
                                             std::span<double> grad) const {
  double* bias = grad.data() + classes_ * features_;
  for (std::size_t k = 0; k < classes_; ++k) {
    const double g = dlogits[k];
    if (g == 0.0) continue;
    double* w = grad.data() + k * features_;
    for (std::size_t j = 0; j < features_; ++j) w[j] += g * x[j];
    bias[k] += g;
  }
}

double cosine_lr(std::size_t step, std::size_t total_steps, double lr_max, double lr_min) {
  if (lr_min > lr_max) throw ValidationError("cosine_lr: lr_min exceeds lr_max");
  if (step > total_steps) throw ValidationError("cosine_lr: step beyond schedule");
  if (total_steps == 0) return lr_max;
  if (step == total_steps) return lr_min;
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return lr_min + 0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamOptimizer::AdamOptimizer(std::size_t num_parameters, AdamConfig config)
    : config_(config), m_(num_parameters, 0.0), v_(num_parameters, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad, double lr) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw ShapeError("adam: parameter count mismatch");
  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
}

BalancedSampler::BalancedSampler(std::span<const std::size_t> sample_datasets, std::size_t batch_size,
                                 std::uint64_t seed)
    : total_(sample_datasets.size()), batch_size_(batch_size), rng_(seed) {
  if (batch_size == 0) throw ValidationError("balanced sampler: batch size must be positive");
  if (sample_datasets.empty()) throw DegenerateInputError("balanced sampler: no samples");
  std::size_t max_dataset = 0;
  for (auto d : sample_datasets) max_dataset = std::max(max_dataset, d);
  std::vector<Pool> pools(max_dataset + 1);
  for (std::size_t i = 0; i < sample_datasets.size(); ++i) pools[sample_datasets[i]].members.push_back(i);
  for (auto& p : pools) {
    if (p.members.empty()) continue;
    std::shuffle(p.members.begin(), p.members.end(), rng_);
    pools_.push_back(std::move(p));
  }
}

std::size_t BalancedSampler::draw(Pool& pool) {
  if (pool.cursor == pool.members.size()) {
    std::shuffle(pool.members.begin(), pool.members.end(), rng_);
    pool.cursor = 0;
  }
  return pool.members[pool.cursor++];
}

std::vector<std::vector<std::size_t>> BalancedSampler::next_epoch() {
  const std::size_t n_pools = pools_.size();
  std::vector<std::size_t> picks;
  picks.reserve(total_);
  for (std::size_t d = 0; d < n_pools; ++d) {
    const std::size_t quota = total_ / n_pools + (d < total_ % n_pools ? 1 : 0);
    for (std::size_t i = 0; i < quota; ++i) picks.push_back(draw(pools_[d]));
  }
  std::shuffle(picks.begin(), picks.end(), rng_);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < picks.size(); start += batch_size_) {
    const std::size_t end = std::min(picks.size(), start + batch_size_);
    batches.emplace_back(picks.begin() + static_cast<std::ptrdiff_t>(start),
                         picks.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

std::vector<std::vector<std::size_t>> balanced_batches(std::span<const LabeledSample> samples,
                                                       std::size_t batch_size, std::uint64_t seed) {
  std::vector<std::size_t> datasets;
  datasets.reserve(samples.size());
  for (const auto& s : samples) datasets.push_back(s.dataset);
  return BalancedSampler(datasets, batch_size, seed).next_epoch();
}

std::vector<LossSample> make_loss_samples(const LinearSoftmaxModel& model,
                                          std::span<const LabeledSample> samples,
                                          std::span<const std::size_t> batch,
                                          const TrainingTaxonomy& taxonomy) {
  std::vector<LossSample> out;
  out.reserve(batch.size());
  for (auto i : batch) {
    const auto& s = samples[i];
    out.push_back({model.logits(s.features), taxonomy.label_set(s.dataset, s.label), 1.0});
  }
  return out;
}

double model_loss_and_gradient(const LinearSoftmaxModel& model, std::span<const LabeledSample> samples,
                               std::span<const std::size_t> batch, const TrainingTaxonomy& taxonomy,
                               const LossConfig& config, std::vector<double>& grad) {
  const auto loss_samples = make_loss_samples(model, samples, batch, taxonomy);
  for (const auto& ls : loss_samples) {
    for (double v : ls.logits) {
      if (!std::isfinite(v)) {
        grad.assign(model.parameters().size(), 0.0);
        return std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  const auto result = batch_loss(loss_samples, config);
  grad.assign(model.parameters().size(), 0.0);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    model.accumulate_gradient(samples[batch[k]].features, result.grads[k], grad);
  }
  return result.mean;
}

TrainResult train(std::span<const LabeledSample> samples, const TrainingTaxonomy& taxonomy,
                  const TrainConfig& config) {
  if (samples.empty()) throw DegenerateInputError("train: no samples");
  if (config.epochs == 0) throw ValidationError("train: epochs must be positive");
  validate_config(config.loss);

  // Plain NLL cannot use aggregate labels; those samples are ignored.
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& labels = taxonomy.label_set(samples[i].dataset, samples[i].label);
    if (config.loss.variant == LossVariant::NLL && labels.size() != 1) continue;
    usable.push_back(i);
  }
  if (usable.empty()) throw DegenerateInputError("train: no sample is usable with this loss");

  TrainResult result;
  result.excluded_samples = samples.size() - usable.size();
  result.model = LinearSoftmaxModel(taxonomy.size(), samples.front().features.size());
  result.model.initialize(derive_seed(config.seed, "init"), config.init_scale);

  std::vector<std::size_t> usable_datasets;
  for (auto i : usable) usable_datasets.push_back(samples[i].dataset);
  BalancedSampler sampler(usable_datasets, config.batch_size, derive_seed(config.seed, "batches"));
  const std::size_t batches_per_epoch = (usable.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = config.epochs * batches_per_epoch;

  AdamOptimizer adam(result.model.parameters().size(), config.adam);
  std::vector<double> grad;
  std::vector<std::size_t> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    const auto batches = sampler.next_epoch();
    for (const auto& local : batches) {
      batch.clear();
      for (auto j : local) batch.push_back(usable[j]);
      const double loss = model_loss_and_gradient(result.model, samples, batch, taxonomy, config.loss, grad);
      if (!std::isfinite(loss)) {
        throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(adam.steps()));
      }
      const double lr = cosine_lr(std::min(adam.steps(), total_steps - 1), total_steps - 1,
                                  config.adam.lr_max, config.adam.lr_min);
      adam.step(result.model.parameters(), grad, lr);
      epoch_loss += loss;
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(batches.size()));
  }
  return result;
}

std::vector<std::vector<double>> predict(const LinearSoftmaxModel& model, std::span<const LabeledSample> samples) {
  std::vector<std::vector<double>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(model.probabilities(s.features));
  return out;
}

MetricsReport evaluate(const LinearSoftmaxModel& model, std::span<const LabeledSample> test,
                       const TrainingTaxonomy& taxonomy, const FlatTaxonomy& truth) {
  std::vector<std::size_t> labels;
  labels.reserve(test.size());
  for (const auto& s : test) labels.push_back(s.hidden);
  const auto probabilities = predict(model, test);
  return cross_eval(probabilities, labels, eval_mapping(taxonomy, truth));
}

}  // namespace unitax
