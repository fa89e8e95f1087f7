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
#include <string_view>
#include <vector>

namespace unitax {

/// Logits over the training classes together with the set of classes that
/// are correct for the sample's dataset label.
struct LossSample {
  std::vector<double> logits;
  std::vector<std::size_t> label_set;
  /// Per-sample modulation weight; used as alpha in AlphaMode::PerSample.
  double weight = 1.0;
};

/// Throws ValidationError on an empty or out-of-range label set, non-finite
/// logits or a non-positive weight.
void validate_sample(const LossSample& sample);

enum class LossVariant {
  NLL,      ///< standard NLL; label set must be a singleton
  NLLPlus,  ///< -ln of the summed probability of the label set
  NLLMax,   ///< -ln of the largest probability in the label set
};

std::string_view to_string(LossVariant variant);
/// Accepts "nll", "nllplus" and "nllmax".
LossVariant parse_loss_variant(std::string_view text);

enum class AlphaMode { Constant, PerSample };

/// Boundary-aware modulation of the variant loss:
///   L = alpha * exp(gamma * (1 - p_hat)) * (-ln p_hat)
/// where p_hat is the variant's aggregated label probability.
struct LossConfig {
  LossVariant variant = LossVariant::NLLPlus;
  double gamma = 0.5;
  double alpha = 1.0;
  AlphaMode alpha_mode = AlphaMode::Constant;
  /// Treat exp(gamma * (1 - p_hat)) as a constant when differentiating.
  bool frozen_modulation = false;
};

void validate_config(const LossConfig& config);

struct LossValue {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logits
};

double log_sum_exp(std::span<const double> values);
/// log-sum-exp over values[i] for i in `subset`.
double log_sum_exp(std::span<const double> values, std::span<const std::size_t> subset);

std::vector<double> softmax(std::span<const double> logits);

double nll(std::span<const double> logits, std::size_t label);

double nll_plus(const LossSample& sample);
std::vector<double> nll_plus_grad(const LossSample& sample);

/// Gradient flows through the labeled argmax only (lowest index on ties).
LossValue nll_max(const LossSample& sample);

/// Loss and gradient of the modulated compound loss for config.variant.
LossValue ba_loss(const LossSample& sample, const LossConfig& config);

struct BatchLoss {
  double mean = 0.0;
  /// Gradient of `mean` with respect to each sample's logits.
  std::vector<std::vector<double>> grads;
};

/// Mean of ba_loss over the batch, accumulated in index order. Throws
/// DegenerateInputError on an empty batch.
BatchLoss batch_loss(std::span<const LossSample> samples, const LossConfig& config);

struct GradcheckOptions {
  std::size_t samples = 1000;
  std::size_t max_dim = 16;
  std::size_t max_label_set = 5;
  double logit_range = 4.0;
  double step = 1e-5;
  double gamma = 2.0;
  double tolerance = 1e-5;
  /// Negative control: perturbs every analytic gradient before comparing.
  bool inject_fault = false;
};

struct GradcheckEntry {
  std::string_view loss;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
  std::size_t sign_violations = 0;
};

struct GradcheckReport {
  std::vector<GradcheckEntry> entries;
  std::size_t samples = 0;
  bool passed(double tolerance) const;
};

/// Compares the analytic gradients of NLL+, NLL-max and the modulated loss
/// against central finite differences on random samples. Relative error is
/// |analytic - numeric|_inf / max(|analytic|_inf, |numeric|_inf) per sample.
/// Sign violations count samples where the NLL+ (or modulated) gradient is
/// not strictly positive off the label set and strictly negative on it.
GradcheckReport run_gradcheck(std::uint64_t seed, const GradcheckOptions& options = {});

}  // namespace unitax
