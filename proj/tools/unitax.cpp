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

// unitax: command line front end.
//
// Exit codes: 0 success, 1 a check failed (gradcheck tolerance, invalid
// universal taxonomy, non-flat input under `inspect`), 2 usage, I/O or input
// errors.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unitax/error.hpp"
#include "unitax/experiment.hpp"
#include "unitax/label_spaces.hpp"
#include "unitax/loss.hpp"
#include "unitax/metrics.hpp"
#include "unitax/taxonomy.hpp"
#include "unitax/taxonomy_io.hpp"
#include "unitax/trainer.hpp"

namespace {

using namespace unitax;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

/// UNITAX_SEED, when set, replaces the built-in default seed of 0.
std::uint64_t default_seed() {
  const char* env = std::getenv("UNITAX_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0') throw LoadError(std::string("UNITAX_SEED is not an unsigned integer: '") + env + "'");
  return v;
}

/// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

TaxonomySet load_flat(const std::string& path) {
  auto set = load_taxonomy(path);
  for (const auto& d : set.datasets) {
    const auto report = validate_flat(d);
    if (!report.ok()) {
      throw ValidationError(path + ": dataset '" + d.name + "' is not flat: " + report.violations.front().message);
    }
  }
  return set;
}

TrainingTaxonomy training_for(const TaxonomySet& set, TaxonomyKind kind) {
  if (kind == TaxonomyKind::Universal) {
    auto universal = build_universal(set.universe, set.datasets);
    apply_names(universal, set.names);
    return build_universal_training(universal, set.datasets);
  }
  return build_training_taxonomy(kind, set.universe, set.datasets);
}

// ---------------------------------------------------------------- compile

struct CompileArgs {
  std::string input;
  std::string output;
  bool trace = false;
};

int run_compile(const CompileArgs& a) {
  const auto set = load_flat(a.input);
  auto result = compile_universal(set.universe, set.datasets);
  apply_names(result.universal, set.names);
  const auto problems = check_universal(result.universal, set.datasets);
  const auto naive = build_naive_concat(set.universe, set.datasets);
  const auto merge = build_partial_merge(set.universe, set.datasets);

  if (a.trace) {
    std::printf("initial potential %zu\n", result.initial_potential);
    for (const auto& s : result.steps) {
      std::printf("rule %d (%zu, %zu) -> %zu classes, potential %zu\n", static_cast<int>(s.rule), s.first,
                  s.second, s.working_size, s.potential);
    }
  }
  if (!a.output.empty()) write_text(a.output, dump_json(universal_to_json(result.universal)));
  std::printf("universal=%zu naive=%zu merge=%zu\n", result.universal.classes.size(), naive.size(), merge.size());
  for (const auto& p : problems) std::fprintf(stderr, "invalid universal taxonomy: %s\n", p.c_str());
  return problems.empty() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string input;
};

int run_inspect(const InspectArgs& a) {
  const auto set = load_taxonomy(a.input);
  std::printf("concepts %zu\n", set.universe.size());
  bool flat = true;
  for (const auto& d : set.datasets) {
    const auto report = validate_flat(d);
    std::printf("dataset %-16s classes %3zu  %s\n", d.name.c_str(), d.classes.size(),
                report.ok() ? "flat" : "NOT FLAT");
    for (const auto& v : report.violations) std::printf("  %s\n", v.message.c_str());
    flat = flat && report.ok();
  }
  if (!flat) return kCheckFailed;

  // Cross-dataset relations, counted over class pairs.
  std::size_t counts[5] = {};
  for (std::size_t i = 0; i < set.datasets.size(); ++i) {
    for (std::size_t j = i + 1; j < set.datasets.size(); ++j) {
      for (const auto& a_cls : set.datasets[i].classes) {
        for (const auto& b_cls : set.datasets[j].classes) {
          ++counts[static_cast<int>(relate(a_cls.extent, b_cls.extent))];
        }
      }
    }
  }
  for (auto r : {ClassRelation::Equal, ClassRelation::SupersetOf, ClassRelation::SubsetOf, ClassRelation::Overlap}) {
    std::printf("pairs %-10s %zu\n", std::string(to_string(r)).c_str(), counts[static_cast<int>(r)]);
  }

  auto universal = build_universal(set.universe, set.datasets);
  apply_names(universal, set.names);
  std::printf("universal classes %zu\n", universal.classes.size());
  for (const auto& m : universal.mappings) {
    for (std::size_t c = 0; c < m.class_names.size(); ++c) {
      if (m.targets[c].size() < 2) continue;
      std::printf("  %s/%s ->", m.dataset.c_str(), m.class_names[c].c_str());
      for (auto t : m.targets[c]) std::printf(" %s", universal.classes[t].name.c_str());
      std::printf("\n");
    }
  }
  return kOk;
}

// ------------------------------------------------------- export-matrices

struct ExportArgs {
  std::string input;
  std::string kind = "universal";
  std::string direction = "train";
  std::string dataset;
  std::string format = "json";
  std::string output;
};

int run_export(const ExportArgs& a) {
  const auto set = load_flat(a.input);
  const auto taxonomy = training_for(set, parse_taxonomy_kind(a.kind));
  const MappingMatrix m = a.direction == "train" ? training_matrix(taxonomy, a.dataset)
                                                 : eval_mapping(taxonomy, set.dataset(a.dataset));
  emit(a.output, a.format == "csv" ? m.to_csv() : dump_json(m.to_json()));
  return kOk;
}

// ------------------------------------------------------------- gradcheck

struct GradcheckArgs {
  std::optional<std::uint64_t> seed;
  std::size_t samples = 1000;
  double tolerance = 1e-5;
  bool inject_fault = false;
  std::string output;
};

int run_gradcheck_cmd(const GradcheckArgs& a) {
  if (a.samples == 0) throw CLI::ValidationError("--n", "must be at least 1");
  GradcheckOptions options;
  options.samples = a.samples;
  options.tolerance = a.tolerance;
  options.inject_fault = a.inject_fault;
  const std::uint64_t seed = a.seed.value_or(default_seed());
  const auto report = run_gradcheck(seed, options);

  Json entries = Json::array();
  for (const auto& e : report.entries) {
    std::printf("%-8s max_rel %.3e  max_abs %.3e  sign_violations %zu\n", std::string(e.loss).c_str(),
                e.max_rel_error, e.max_abs_error, e.sign_violations);
    entries.push_back({{"loss", std::string(e.loss)},
                       {"max_rel_error", e.max_rel_error},
                       {"max_abs_error", e.max_abs_error},
                       {"sign_violations", e.sign_violations}});
  }
  const bool ok = report.passed(a.tolerance);
  std::printf("%s (%zu samples, tolerance %.0e)\n", ok ? "PASS" : "FAIL", report.samples, a.tolerance);
  if (!a.output.empty()) {
    write_text(a.output, dump_json({{"seed", seed},
                                    {"samples", report.samples},
                                    {"tolerance", a.tolerance},
                                    {"passed", ok},
                                    {"entries", std::move(entries)}}));
  }
  return ok ? kOk : kCheckFailed;
}

// ----------------------------------------------------------- synth-train

struct SynthArgs {
  std::string spec;
  std::string loss = "nllplus";
  std::string kind = "universal";
  std::optional<std::uint64_t> seed;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double gamma = 0.0;
  double lr_max = 5e-4;
  double lr_min = 6e-6;
  std::string output;
};

std::string metrics_table(const MetricsReport& m) {
  std::string out;
  char buf[128];
  for (std::size_t c = 0; c < m.class_names.size(); ++c) {
    if (m.iou[c]) {
      std::snprintf(buf, sizeof buf, "%-24s %8.1f\n", m.class_names[c].c_str(), 100.0 * *m.iou[c]);
    } else {
      std::snprintf(buf, sizeof buf, "%-24s %8s\n", m.class_names[c].c_str(), "-");
    }
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-24s %8.1f\n", "mIoU", 100.0 * m.miou);
  return out + buf;
}

int run_synth(const SynthArgs& a) {
  const std::string text = read_text(a.spec);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(a.spec + ": JSON parse error: " + e.what());
  }
  auto spec = synthetic_spec_from_json(doc, a.spec);
  const std::uint64_t seed = a.seed.value_or(default_seed());
  spec.seed = derive_seed(seed, "data");

  const auto kind = parse_taxonomy_kind(a.kind);
  const auto taxonomy = build_training_taxonomy(kind, spec.classes, spec.datasets);
  TrainConfig config;
  config.loss = LossConfig{parse_loss_variant(a.loss), a.gamma, 1.0, AlphaMode::Constant, false};
  config.adam.lr_max = a.lr_max;
  config.adam.lr_min = a.lr_min;
  config.epochs = a.epochs;
  config.batch_size = a.batch_size;
  config.seed = derive_seed(seed, "train");

  const auto samples = generate(spec);
  const auto trained = train(samples, taxonomy, config);
  const auto metrics = evaluate(trained.model, generate_test(spec), taxonomy, spec.truth_taxonomy());

  std::printf("taxonomy %s (%zu logits), loss %s, %zu samples (%zu excluded)\n",
              std::string(to_string(kind)).c_str(), taxonomy.size(), std::string(to_string(config.loss.variant)).c_str(),
              samples.size(), trained.excluded_samples);
  std::printf("loss %.6f -> %.6f\n", trained.loss_trace.front(), trained.loss_trace.back());
  std::cout << metrics_table(metrics);
  if (!a.output.empty()) {
    write_text(a.output, dump_json({{"seed", seed},
                                    {"taxonomy", std::string(to_string(kind))},
                                    {"loss", std::string(to_string(config.loss.variant))},
                                    {"logits", taxonomy.size()},
                                    {"epochs", a.epochs},
                                    {"excluded_samples", trained.excluded_samples},
                                    {"loss_trace", trained.loss_trace},
                                    {"metrics", metrics.to_json()}}));
  }
  return kOk;
}

// ------------------------------------------------------------ experiment

struct ExperimentArgs {
  std::optional<std::uint64_t> seed;
  std::string loss;
  std::vector<std::string> models;
  bool list = false;
  std::size_t epochs = 200;
  std::string output;
};

int run_experiment(const ExperimentArgs& a) {
  if (a.list) {
    for (const auto& v : experiment_variants()) std::printf("%s\n", v.name.c_str());
    return kOk;
  }
  ExperimentConfig config;
  config.seed = a.seed.value_or(default_seed());
  config.epochs = a.epochs;

  std::vector<std::string> only = a.models;
  if (!a.loss.empty()) {
    const auto variant = parse_loss_variant(a.loss);
    for (const auto& v : experiment_variants()) {
      if (v.loss == variant && (a.models.empty() || std::find(a.models.begin(), a.models.end(), v.name) != a.models.end())) {
        only.push_back(v.name);
      }
    }
    if (only.empty()) throw ValidationError("experiment: no model matches --loss " + a.loss);
  }
  const auto report = run_unlabeled_concept_experiment(config, only);
  std::cout << report.to_table();
  if (!a.output.empty()) write_text(a.output, dump_json(report.to_json()));
  return kOk;
}

// -------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string input;
  std::string kind = "universal";
  std::string dataset;
  std::string predictions;
  std::string output;
};

// Predictions file: {"probabilities": [[...], ...], "labels": [...]}, where
// each probability row is over the training classes of the chosen kind and
// labels are class names (or indices) of the evaluation dataset.
int run_evaluate(const EvaluateArgs& a) {
  const auto set = load_flat(a.input);
  const auto taxonomy = training_for(set, parse_taxonomy_kind(a.kind));
  const auto& eval = set.dataset(a.dataset);
  const auto matrix = eval_mapping(taxonomy, eval);

  const std::string text = read_text(a.predictions);
  std::vector<std::vector<double>> probabilities;
  std::vector<std::size_t> labels;
  try {
    const auto doc = Json::parse(text);
    probabilities = doc.at("probabilities").get<std::vector<std::vector<double>>>();
    for (const auto& l : doc.at("labels")) {
      labels.push_back(l.is_string() ? eval.index_of(l.get<std::string>()) : l.get<std::size_t>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(a.predictions + ": " + e.what());
  }
  if (probabilities.size() != labels.size()) {
    throw ShapeError(a.predictions + ": " + std::to_string(probabilities.size()) + " predictions but " +
                     std::to_string(labels.size()) + " labels");
  }
  const auto metrics = cross_eval(probabilities, labels, matrix);
  std::cout << metrics_table(metrics);
  if (!a.output.empty()) write_text(a.output, dump_json(metrics.to_json()));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal taxonomies over multiple segmentation datasets"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"naive", "merge", "universal"};
  const std::vector<std::string> losses = {"nll", "nllplus", "nllmax"};

  CompileArgs compile_args;
  auto* compile = app.add_subcommand("compile", "Compile the universal taxonomy and print class counts");
  compile->add_option("taxonomy", compile_args.input, "Taxonomy JSON")->required()->check(CLI::ExistingFile);
  compile->add_option("-o,--output", compile_args.output, "Write the universal taxonomy and mappings here");
  compile->add_flag("--trace", compile_args.trace, "Print every rewrite step");

  InspectArgs inspect_args;
  auto* inspect = app.add_subcommand("inspect", "Check flatness and summarize class relations");
  inspect->add_option("taxonomy", inspect_args.input, "Taxonomy JSON")->required()->check(CLI::ExistingFile);

  ExportArgs export_args;
  auto* exportm = app.add_subcommand("export-matrices", "Export a training or evaluation mapping matrix");
  exportm->add_option("taxonomy", export_args.input, "Taxonomy JSON")->required()->check(CLI::ExistingFile);
  exportm->add_option("--kind", export_args.kind, "Training taxonomy")->check(CLI::IsMember(kinds));
  exportm->add_option("--direction", export_args.direction, "train: dataset class -> training classes; "
                                                            "eval: evaluation class -> training classes")
      ->check(CLI::IsMember({"train", "eval"}));
  exportm->add_option("--dataset", export_args.dataset, "Dataset name")->required();
  exportm->add_option("--format", export_args.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  exportm->add_option("-o,--output", export_args.output, "Output file (default stdout)");

  GradcheckArgs grad_args;
  auto* grad = app.add_subcommand("gradcheck", "Compare analytic loss gradients with finite differences");
  grad->add_option("--seed", grad_args.seed, "Seed (default $UNITAX_SEED or 0)");
  grad->add_option("-n,--n", grad_args.samples, "Random samples");
  grad->add_option("--tolerance", grad_args.tolerance, "Maximum relative error");
  grad->add_flag("--inject-fault", grad_args.inject_fault)->group("");
  grad->add_option("-o,--output", grad_args.output, "Write the report as JSON");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth-train", "Train and evaluate on a synthetic spec");
  synth->add_option("spec", synth_args.spec, "Synthetic spec JSON")->required()->check(CLI::ExistingFile);
  synth->add_option("--loss", synth_args.loss, "Loss variant")->check(CLI::IsMember(losses));
  synth->add_option("--kind", synth_args.kind, "Training taxonomy")->check(CLI::IsMember(kinds));
  synth->add_option("--seed", synth_args.seed, "Seed (default $UNITAX_SEED or 0)");
  synth->add_option("--epochs", synth_args.epochs, "Epochs")->check(CLI::PositiveNumber);
  synth->add_option("--batch-size", synth_args.batch_size, "Batch size")->check(CLI::PositiveNumber);
  synth->add_option("--gamma", synth_args.gamma, "Modulation exponent");
  synth->add_option("--lr-max", synth_args.lr_max, "Initial learning rate");
  synth->add_option("--lr-min", synth_args.lr_min, "Final learning rate");
  synth->add_option("-o,--output", synth_args.output, "Write the report as JSON");

  ExperimentArgs exp_args;
  auto* exp = app.add_subcommand("experiment", "Run the unlabeled-concept experiment");
  exp->add_option("--seed", exp_args.seed, "Seed (default $UNITAX_SEED or 0)");
  exp->add_option("--loss", exp_args.loss, "Only models trained with this loss")->check(CLI::IsMember(losses));
  exp->add_option("--model", exp_args.models, "Only these models (repeatable)");
  exp->add_flag("--list-variants", exp_args.list, "Print model names and exit");
  exp->add_option("--epochs", exp_args.epochs, "Epochs")->check(CLI::PositiveNumber);
  exp->add_option("-o,--output", exp_args.output, "Write the report as JSON");

  EvaluateArgs eval_args;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against an evaluation dataset");
  evaluate_cmd->add_option("taxonomy", eval_args.input, "Taxonomy JSON")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--kind", eval_args.kind, "Training taxonomy of the predictions")
      ->check(CLI::IsMember(kinds));
  evaluate_cmd->add_option("--dataset", eval_args.dataset, "Evaluation dataset")->required();
  evaluate_cmd->add_option("--predictions", eval_args.predictions, "Predictions JSON")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("-o,--output", eval_args.output, "Write metrics as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*compile) return run_compile(compile_args);
    if (*inspect) return run_inspect(inspect_args);
    if (*exportm) return run_export(export_args);
    if (*grad) return run_gradcheck_cmd(grad_args);
    if (*synth) return run_synth(synth_args);
    if (*exp) return run_experiment(exp_args);
    if (*evaluate_cmd) return run_evaluate(eval_args);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "unitax: %s\n", e.what());
    return kUsage;
  } catch (const unitax::Error& e) {
    std::fprintf(stderr, "unitax: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
