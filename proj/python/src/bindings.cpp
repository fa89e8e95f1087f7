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

// Taxonomies and reports cross the boundary as JSON text; the Python package
// decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "unitax/error.hpp"
#include "unitax/experiment.hpp"
#include "unitax/label_spaces.hpp"
#include "unitax/loss.hpp"
#include "unitax/taxonomy.hpp"
#include "unitax/taxonomy_io.hpp"

namespace py = pybind11;
using namespace unitax;

namespace {

TaxonomySet load_flat(const std::string& text, const std::string& source) {
  auto set = parse_taxonomy(text, source);
  for (const auto& d : set.datasets) {
    const auto report = validate_flat(d);
    if (!report.ok()) throw ValidationError(report.violations.front().message);
  }
  return set;
}

TrainingTaxonomy training_for(const TaxonomySet& set, TaxonomyKind kind) {
  if (kind != TaxonomyKind::Universal) return build_training_taxonomy(kind, set.universe, set.datasets);
  auto universal = build_universal(set.universe, set.datasets);
  apply_names(universal, set.names);
  return build_universal_training(universal, set.datasets);
}

LossSample sample_of(std::vector<double> logits, std::vector<std::size_t> labels, double weight = 1.0) {
  return {std::move(logits), std::move(labels), weight};
}

}  // namespace

PYBIND11_MODULE(_unitax, m) {
  m.doc() = "Label-space unification for multi-dataset segmentation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidClassError>(m, "InvalidClassError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<LoadError>(m, "LoadError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  m.def(
      "compile",
      [](const std::string& text, const std::string& source) {
        const auto set = load_flat(text, source);
        auto universal = build_universal(set.universe, set.datasets);
        apply_names(universal, set.names);
        return dump_json(universal_to_json(universal));
      },
      py::arg("text"), py::arg("source") = "<input>", "Universal taxonomy of a taxonomy document, as JSON text.");

  m.def(
      "class_counts",
      [](const std::string& text) {
        const auto set = load_flat(text, "<input>");
        py::dict out;
        out["universal"] = build_universal(set.universe, set.datasets).classes.size();
        out["naive"] = build_naive_concat(set.universe, set.datasets).size();
        out["merge"] = build_partial_merge(set.universe, set.datasets).size();
        return out;
      },
      py::arg("text"));

  m.def(
      "mapping_matrix",
      [](const std::string& text, const std::string& kind, const std::string& dataset, const std::string& direction) {
        const auto set = load_flat(text, "<input>");
        const auto taxonomy = training_for(set, parse_taxonomy_kind(kind));
        if (direction == "train") return dump_json(training_matrix(taxonomy, dataset).to_json());
        if (direction == "eval") return dump_json(eval_mapping(taxonomy, set.dataset(dataset)).to_json());
        throw ValidationError("direction must be 'train' or 'eval'");
      },
      py::arg("text"), py::arg("kind") = "universal", py::arg("dataset"), py::arg("direction") = "train");

  m.def(
      "eval_scores",
      [](const std::string& text, const std::string& kind, const std::string& dataset, std::vector<double> p) {
        const auto set = load_flat(text, "<input>");
        const auto taxonomy = training_for(set, parse_taxonomy_kind(kind));
        const auto matrix = eval_mapping(taxonomy, set.dataset(dataset));
        return std::pair{matrix.row_names(), dataset_scores(p, matrix)};
      },
      py::arg("text"), py::arg("kind"), py::arg("dataset"), py::arg("probabilities"),
      "Row names (with void last) and summed probabilities per evaluation class.");

  m.def("softmax", [](std::vector<double> logits) { return softmax(logits); }, py::arg("logits"));
  m.def(
      "nll_plus",
      [](std::vector<double> logits, std::vector<std::size_t> labels) {
        const auto s = sample_of(std::move(logits), std::move(labels));
        return std::pair{nll_plus(s), nll_plus_grad(s)};
      },
      py::arg("logits"), py::arg("labels"), "(loss, gradient)");
  m.def(
      "nll_max",
      [](std::vector<double> logits, std::vector<std::size_t> labels) {
        auto v = nll_max(sample_of(std::move(logits), std::move(labels)));
        return std::pair{v.loss, std::move(v.grad)};
      },
      py::arg("logits"), py::arg("labels"), "(loss, gradient)");
  m.def(
      "ba_loss",
      [](std::vector<double> logits, std::vector<std::size_t> labels, const std::string& variant, double gamma,
         double alpha, bool frozen) {
        LossConfig config{parse_loss_variant(variant), gamma, alpha, AlphaMode::Constant, frozen};
        auto v = ba_loss(sample_of(std::move(logits), std::move(labels)), config);
        return std::pair{v.loss, std::move(v.grad)};
      },
      py::arg("logits"), py::arg("labels"), py::arg("variant") = "nllplus", py::arg("gamma") = 0.5,
      py::arg("alpha") = 1.0, py::arg("frozen_modulation") = false, "(loss, gradient)");

  m.def(
      "gradcheck",
      [](std::uint64_t seed, std::size_t samples, double tolerance, bool inject_fault) {
        GradcheckOptions options;
        options.samples = samples;
        options.tolerance = tolerance;
        options.inject_fault = inject_fault;
        const auto report = run_gradcheck(seed, options);
        py::dict losses;
        for (const auto& e : report.entries) {
          py::dict entry;
          entry["max_abs_error"] = e.max_abs_error;
          entry["max_rel_error"] = e.max_rel_error;
          entry["sign_violations"] = e.sign_violations;
          losses[py::str(std::string(e.loss))] = entry;
        }
        py::dict out;
        out["passed"] = report.passed(tolerance);
        out["samples"] = report.samples;
        out["losses"] = losses;
        return out;
      },
      py::arg("seed") = 0, py::arg("samples") = 1000, py::arg("tolerance") = 1e-5, py::arg("inject_fault") = false);

  m.def(
      "run_experiment",
      [](std::uint64_t seed, std::size_t epochs, std::vector<std::string> models) {
        ExperimentConfig config;
        config.seed = seed;
        config.epochs = epochs;
        py::gil_scoped_release release;
        return dump_json(run_unlabeled_concept_experiment(config, models).to_json());
      },
      py::arg("seed") = 0, py::arg("epochs") = 200, py::arg("models") = std::vector<std::string>{},
      "Report of the unlabeled-concept experiment, as JSON text.");

  m.attr("__version__") = "0.1.0";
}
