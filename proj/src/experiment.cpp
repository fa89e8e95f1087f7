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

#include "unitax/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "unitax/error.hpp"

namespace unitax {

namespace {

const std::vector<std::string> kBackground = {
    "road",       "sidewalk", "building", "wall",   "fence",  "pole",  "traffic-light",
    "traffic-sign", "vegetation", "terrain", "sky", "person", "rider", "train"};

ConceptSet set_of(const ConceptUniverse& u, std::initializer_list<const char*> ids) {
  ConceptSet s(u.size());
  for (const char* id : ids) s.insert(*u.index_of(id));
  return s;
}

}  // namespace

const std::vector<std::string>& vehicle_classes() {
  static const std::vector<std::string> names = {"car", "bus", "truck", "motorcycle", "bicycle"};
  return names;
}

const std::vector<ModelVariant>& experiment_variants() {
  static const std::vector<ModelVariant> variants = {
      {"nll-baseline", TaxonomyKind::Universal, LossVariant::NLL, false},
      {"nll-max", TaxonomyKind::Universal, LossVariant::NLLMax, false},
      {"naive-concat", TaxonomyKind::NaiveConcat, LossVariant::NLL, false},
      {"partial-merge", TaxonomyKind::PartialMerge, LossVariant::NLL, false},
      {"nll-plus", TaxonomyKind::Universal, LossVariant::NLLPlus, false},
      {"oracle", TaxonomyKind::Universal, LossVariant::NLL, true},
  };
  return variants;
}

SyntheticSpec unlabeled_concept_spec(const ExperimentConfig& config) {
  if (config.background_classes > kBackground.size()) {
    throw ValidationError("experiment: at most " + std::to_string(kBackground.size()) + " background classes");
  }
  std::vector<std::string> ids(kBackground.begin(),
                               kBackground.begin() + static_cast<std::ptrdiff_t>(config.background_classes));
  for (const char* v : {"car", "truck", "bus", "motorcycle", "bicycle"}) ids.emplace_back(v);

  SyntheticSpec spec;
  spec.classes = ConceptUniverse(ids);
  spec.sigma = config.sigma;
  spec.means = corner_means(ids.size(), config.separation * config.sigma);
  spec.samples_per_dataset = config.samples_per_split;
  spec.test_samples_per_class = config.test_samples_per_class;
  spec.seed = derive_seed(config.seed, "data");

  const auto& u = spec.classes;
  FlatTaxonomy a{"split-a", {}};
  FlatTaxonomy b{"split-b", {}};
  for (std::size_t i = 0; i < config.background_classes; ++i) {
    a.classes.push_back({a.name, ids[i], ConceptSet(u.size(), {i})});
    b.classes.push_back({b.name, ids[i], ConceptSet(u.size(), {i})});
  }
  a.classes.push_back({a.name, "four-wheels-vehicle", set_of(u, {"car", "bus", "truck"})});
  a.classes.push_back({a.name, "motorcycle", set_of(u, {"motorcycle"})});
  a.classes.push_back({a.name, "bicycle", set_of(u, {"bicycle"})});
  b.classes.push_back({b.name, "personal-vehicle", set_of(u, {"car", "motorcycle", "bicycle"})});
  b.classes.push_back({b.name, "truck", set_of(u, {"truck"})});
  b.classes.push_back({b.name, "bus", set_of(u, {"bus"})});
  spec.datasets = {std::move(a), std::move(b)};
  return spec;
}

const ExperimentRow& ExperimentReport::row(std::string_view name) const {
  for (const auto& r : rows) {
    if (r.variant.name == name) return r;
  }
  throw ValidationError("experiment report has no model '" + std::string(name) + "'");
}

double ExperimentReport::iou(std::string_view model, std::string_view cls) const {
  const auto& r = row(model);
  for (std::size_t c = 0; c < r.metrics.class_names.size(); ++c) {
    if (r.metrics.class_names[c] == cls) return r.metrics.iou[c].value_or(0.0);
  }
  throw ValidationError("experiment report has no class '" + std::string(cls) + "'");
}

Json ExperimentReport::to_json() const {
  Json models = Json::array();
  for (const auto& r : rows) {
    models.push_back({{"name", r.variant.name},
                      {"taxonomy", std::string(to_string(r.variant.kind))},
                      {"loss", std::string(to_string(r.variant.loss))},
                      {"oracle", r.variant.oracle},
                      {"logits", r.logits},
                      {"excluded_samples", r.excluded_samples},
                      {"final_loss", r.final_loss},
                      {"metrics", r.metrics.to_json()}});
  }
  return Json{{"experiment", "unlabeled-concept"},
              {"config",
               {{"seed", config.seed},
                {"background_classes", config.background_classes},
                {"separation_sigmas", config.separation},
                {"sigma", config.sigma},
                {"samples_per_split", config.samples_per_split},
                {"test_samples_per_class", config.test_samples_per_class},
                {"epochs", config.epochs},
                {"batch_size", config.batch_size},
                {"lr_max", config.adam.lr_max},
                {"lr_min", config.adam.lr_min},
                {"gamma", config.gamma}}},
              {"classes", class_names},
              {"models", std::move(models)}};
}

std::string ExperimentReport::to_table() const {
  std::ostringstream out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s", "model");
  out << buf;
  for (const auto& v : vehicle_classes()) {
    std::snprintf(buf, sizeof buf, " %10s", v.c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, " %10s\n", "mIoU");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-14s", r.variant.name.c_str());
    out << buf;
    for (const auto& v : vehicle_classes()) {
      std::snprintf(buf, sizeof buf, " %10.1f", 100.0 * iou(r.variant.name, v));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, " %10.1f\n", 100.0 * r.metrics.miou);
    out << buf;
  }
  return out.str();
}

ExperimentReport run_unlabeled_concept_experiment(const ExperimentConfig& config,
                                                  const std::vector<std::string>& only) {
  const SyntheticSpec spec = unlabeled_concept_spec(config);
  const auto train_samples = generate(spec);
  const auto test_samples = generate_test(spec);
  const FlatTaxonomy truth = spec.truth_taxonomy();

  std::vector<LabeledSample> oracle_samples = train_samples;
  for (auto& s : oracle_samples) {
    s.dataset = 0;
    s.label = s.hidden;
  }

  ExperimentReport report;
  report.config = config;
  report.class_names = spec.classes.ids();

  for (const auto& variant : experiment_variants()) {
    if (!only.empty() && std::find(only.begin(), only.end(), variant.name) == only.end()) continue;

    const std::vector<FlatTaxonomy> oracle_taxonomies = {truth};
    const auto taxonomy = variant.oracle
                              ? build_training_taxonomy(variant.kind, spec.classes, oracle_taxonomies)
                              : build_training_taxonomy(variant.kind, spec.classes, spec.datasets);
    TrainConfig train_config;
    train_config.loss = LossConfig{variant.loss, config.gamma, 1.0, AlphaMode::Constant, false};
    train_config.adam = config.adam;
    train_config.epochs = config.epochs;
    train_config.batch_size = config.batch_size;
    train_config.seed = derive_seed(config.seed, "train");

    const auto& samples = variant.oracle ? oracle_samples : train_samples;
    auto trained = train(samples, taxonomy, train_config);

    ExperimentRow row;
    row.variant = variant;
    row.metrics = evaluate(trained.model, test_samples, taxonomy, truth);
    row.logits = taxonomy.size();
    row.excluded_samples = trained.excluded_samples;
    row.final_loss = trained.loss_trace.back();
    report.rows.push_back(std::move(row));
  }
  if (report.rows.empty()) throw ValidationError("experiment: no model selected");
  return report;
}

}  // namespace unitax
