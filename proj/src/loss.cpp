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

#include "unitax/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "unitax/error.hpp"

namespace unitax {

void validate_sample(const LossSample& sample) {
  if (sample.label_set.empty()) throw ValidationError("loss sample: empty label set");
  for (std::size_t i = 0; i < sample.label_set.size(); ++i) {
    const auto u = sample.label_set[i];
    if (u >= sample.logits.size()) throw ValidationError("loss sample: label index out of range");
    for (std::size_t j = 0; j < i; ++j) {
      if (sample.label_set[j] == u) throw ValidationError("loss sample: repeated label index");
    }
  }
  for (double s : sample.logits) {
    if (!std::isfinite(s)) throw ValidationError("loss sample: non-finite logit");
  }
  if (!(sample.weight > 0.0) || !std::isfinite(sample.weight)) {
    throw ValidationError("loss sample: weight must be positive");
  }
}

std::string_view to_string(LossVariant variant) {
  switch (variant) {
    case LossVariant::NLL: return "nll";
    case LossVariant::NLLPlus: return "nllplus";
    case LossVariant::NLLMax: return "nllmax";
  }
  return "?";
}

LossVariant parse_loss_variant(std::string_view text) {
  if (text == "nll") return LossVariant::NLL;
  if (text == "nllplus") return LossVariant::NLLPlus;
  if (text == "nllmax") return LossVariant::NLLMax;
  throw ValidationError("unknown loss variant '" + std::string(text) + "'");
}

void validate_config(const LossConfig& config) {
  if (!(config.gamma >= 0.0)) throw ValidationError("loss config: gamma must be non-negative");
  if (config.alpha_mode == AlphaMode::Constant && !(config.alpha > 0.0)) {
    throw ValidationError("loss config: alpha must be positive");
  }
}

double log_sum_exp(std::span<const double> values) {
  const double m = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

double log_sum_exp(std::span<const double> values, std::span<const std::size_t> subset) {
  double m = -std::numeric_limits<double>::infinity();
  for (auto i : subset) m = std::max(m, values[i]);
  double sum = 0.0;
  for (auto i : subset) sum += std::exp(values[i] - m);
  return m + std::log(sum);
}

std::vector<double> softmax(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) p[i] = std::exp(logits[i] - lse);
  return p;
}

double nll(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) throw ValidationError("nll: label index out of range");
  return log_sum_exp(logits) - logits[label];
}

namespace {

// -ln p_hat for the variant, together with d(-ln p_hat)/d logits.
LossValue variant_nll(const LossSample& sample, LossVariant variant) {
  const auto& s = sample.logits;
  const double lse_all = log_sum_exp(s);
  LossValue out;
  out.grad.resize(s.size());
  for (std::size_t u = 0; u < s.size(); ++u) out.grad[u] = std::exp(s[u] - lse_all);

  switch (variant) {
    case LossVariant::NLL:
      if (sample.label_set.size() != 1) {
        throw ValidationError("nll: label set must contain exactly one class");
      }
      [[fallthrough]];
    case LossVariant::NLLMax: {
      std::size_t best = sample.label_set.front();
      for (auto u : sample.label_set) {
        if (s[u] > s[best] || (s[u] == s[best] && u < best)) best = u;
      }
      out.loss = lse_all - s[best];
      out.grad[best] -= 1.0;
      break;
    }
    case LossVariant::NLLPlus: {
      const double lse_label = log_sum_exp(s, sample.label_set);
      // Clamp rounding noise when the label set carries all the mass.
      out.loss = std::max(0.0, lse_all - lse_label);
      for (auto u : sample.label_set) out.grad[u] -= std::exp(s[u] - lse_label);
      break;
    }
  }
  return out;
}

}  // namespace

double nll_plus(const LossSample& sample) {
  validate_sample(sample);
  return variant_nll(sample, LossVariant::NLLPlus).loss;
}

std::vector<double> nll_plus_grad(const LossSample& sample) {
  validate_sample(sample);
  return variant_nll(sample, LossVariant::NLLPlus).grad;
}

LossValue nll_max(const LossSample& sample) {
  validate_sample(sample);
  return variant_nll(sample, LossVariant::NLLMax);
}

LossValue ba_loss(const LossSample& sample, const LossConfig& config) {
  validate_sample(sample);
  validate_config(config);
  LossValue base = variant_nll(sample, config.variant);
  const double alpha = config.alpha_mode == AlphaMode::PerSample ? sample.weight : config.alpha;
  if (config.gamma == 0.0) {
    // Exact reduction; avoids touching the base values at all when alpha is 1.
    if (alpha != 1.0) {
      base.loss *= alpha;
      for (double& g : base.grad) g *= alpha;
    }
    return base;
  }
  const double ell = base.loss;
  const double p_hat = std::exp(-ell);
  const double modulation = alpha * std::exp(config.gamma * (1.0 - p_hat));
  // d/d ell of exp(gamma (1 - e^-ell)) is gamma * p_hat * exp(...).
  const double dloss_dell =
      config.frozen_modulation ? modulation : modulation * (1.0 + config.gamma * p_hat * ell);
  LossValue out;
  out.loss = modulation * ell;
  out.grad = std::move(base.grad);
  for (double& g : out.grad) g *= dloss_dell;
  return out;
}

BatchLoss batch_loss(std::span<const LossSample> samples, const LossConfig& config) {
  if (samples.empty()) throw DegenerateInputError("batch_loss: empty batch");
  BatchLoss out;
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  double sum = 0.0;
  out.grads.reserve(samples.size());
  for (const auto& sample : samples) {
    auto value = ba_loss(sample, config);
    sum += value.loss;
    for (double& g : value.grad) g *= inv_n;
    out.grads.push_back(std::move(value.grad));
  }
  out.mean = sum * inv_n;
  return out;
}

bool GradcheckReport::passed(double tolerance) const {
  for (const auto& e : entries) {
    if (!(e.max_rel_error < tolerance) || e.sign_violations != 0) return false;
  }
  return !entries.empty();
}

namespace {

LossSample random_sample(std::mt19937_64& rng, const GradcheckOptions& options) {
  const std::size_t max_labels = std::max<std::size_t>(1, std::min(options.max_label_set, options.max_dim - 1));
  std::uniform_int_distribution<std::size_t> label_count(1, max_labels);
  const std::size_t k = label_count(rng);
  std::uniform_int_distribution<std::size_t> dim_dist(k + 1, options.max_dim);
  const std::size_t dim = dim_dist(rng);
  std::uniform_real_distribution<double> logit(-options.logit_range, options.logit_range);

  LossSample sample;
  sample.logits.resize(dim);
  for (double& s : sample.logits) s = logit(rng);
  std::vector<std::size_t> order(dim);
  for (std::size_t i = 0; i < dim; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  sample.label_set.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  return sample;
}

// Smallest gap between the labeled maximum and any other labeled logit.
double labeled_margin(const LossSample& sample) {
  double top = -std::numeric_limits<double>::infinity();
  for (auto u : sample.label_set) top = std::max(top, sample.logits[u]);
  double margin = std::numeric_limits<double>::infinity();
  bool seen_top = false;
  for (auto u : sample.label_set) {
    if (sample.logits[u] == top && !seen_top) {
      seen_top = true;
      continue;
    }
    margin = std::min(margin, top - sample.logits[u]);
  }
  return margin;
}

template <typename LossFn>
std::vector<double> central_differences(const LossSample& sample, double h, LossFn loss) {
  std::vector<double> fd(sample.logits.size());
  LossSample probe = sample;
  for (std::size_t i = 0; i < fd.size(); ++i) {
    const double saved = probe.logits[i];
    probe.logits[i] = saved + h;
    const double up = loss(probe);
    probe.logits[i] = saved - h;
    const double down = loss(probe);
    probe.logits[i] = saved;
    fd[i] = (up - down) / (2.0 * h);
  }
  return fd;
}

void record(GradcheckEntry& entry, std::vector<double> analytic, const std::vector<double>& numeric,
            bool inject_fault) {
  if (inject_fault) analytic[0] += 1e-3;
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  entry.max_abs_error = std::max(entry.max_abs_error, diff);
  entry.max_rel_error = std::max(entry.max_rel_error, scale > 0.0 ? diff / scale : diff);
}

bool has_sign_structure(const LossSample& sample, const std::vector<double>& grad) {
  for (std::size_t u = 0; u < grad.size(); ++u) {
    const bool labeled =
        std::find(sample.label_set.begin(), sample.label_set.end(), u) != sample.label_set.end();
    if (labeled ? !(grad[u] < 0.0) : !(grad[u] > 0.0)) return false;
  }
  return true;
}

}  // namespace

GradcheckReport run_gradcheck(std::uint64_t seed, const GradcheckOptions& options) {
  if (options.samples == 0) throw ValidationError("gradcheck: need at least one sample");
  if (options.max_dim < 2) throw ValidationError("gradcheck: max_dim must be at least 2");
  std::mt19937_64 rng(seed);
  GradcheckEntry plus{"nllplus"};
  GradcheckEntry max{"nllmax"};
  GradcheckEntry modulated{"ba"};
  LossConfig ba_config{LossVariant::NLLPlus, options.gamma, 1.0, AlphaMode::Constant, false};

  for (std::size_t n = 0; n < options.samples; ++n) {
    LossSample sample = random_sample(rng, options);
    // NLL-max is not differentiable at labeled ties; keep away from them.
    while (labeled_margin(sample) < 1e3 * options.step) sample = random_sample(rng, options);

    auto g_plus = nll_plus_grad(sample);
    if (!has_sign_structure(sample, g_plus)) ++plus.sign_violations;
    record(plus, g_plus, central_differences(sample, options.step, [](const LossSample& s) { return nll_plus(s); }),
           options.inject_fault);

    record(max, nll_max(sample).grad,
           central_differences(sample, options.step, [](const LossSample& s) { return nll_max(s).loss; }),
           options.inject_fault);

    auto g_ba = ba_loss(sample, ba_config).grad;
    if (!has_sign_structure(sample, g_ba)) ++modulated.sign_violations;
    record(modulated, g_ba,
           central_differences(sample, options.step,
                               [&](const LossSample& s) { return ba_loss(s, ba_config).loss; }),
           options.inject_fault);
  }
  GradcheckReport report;
  report.samples = options.samples;
  report.entries = {plus, max, modulated};
  return report;
}

}  // namespace unitax
