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

#include <doctest.h>

#include "unitax/error.hpp"
#include "unitax/experiment.hpp"

using namespace unitax;

TEST_SUITE("experiment") {

TEST_CASE("six variants in table order") {
  std::vector<std::string> names;
  for (const auto& v : experiment_variants()) names.push_back(v.name);
  CHECK(names == std::vector<std::string>{"nll-baseline", "nll-max", "naive-concat", "partial-merge", "nll-plus",
                                          "oracle"});
  CHECK(vehicle_classes() == std::vector<std::string>{"car", "bus", "truck", "motorcycle", "bicycle"});
}

TEST_CASE("car is only ever labeled through an aggregate") {
  const auto spec = unlabeled_concept_spec({});
  REQUIRE(spec.datasets.size() == 2);
  CHECK(spec.classes.size() == 11);
  const std::size_t car = *spec.classes.index_of("car");
  for (const auto& d : spec.datasets) {
    CHECK(validate_flat(d).ok());
    for (const auto& c : d.classes) {
      if (c.extent.contains(car)) CHECK(c.extent.count() == 3);
    }
  }
  ExperimentConfig too_many;
  too_many.background_classes = 100;
  CHECK_THROWS_AS(unlabeled_concept_spec(too_many), ValidationError);
}

TEST_CASE("a short run reports every selected model") {
  ExperimentConfig config;
  config.epochs = 15;
  config.samples_per_split = 600;
  config.test_samples_per_class = 60;
  config.adam.lr_max = 5e-3;
  const auto report = run_unlabeled_concept_experiment(
      config, {"nll-baseline", "naive-concat", "partial-merge", "nll-plus", "oracle"});
  REQUIRE(report.rows.size() == 5);
  CHECK(report.row("nll-plus").logits == 11);
  CHECK(report.row("naive-concat").logits == 18);
  CHECK(report.row("partial-merge").logits == 12);
  CHECK(report.row("oracle").logits == 11);
  CHECK(report.row("nll-baseline").excluded_samples > 0);
  CHECK(report.row("nll-plus").excluded_samples == 0);
  CHECK(report.iou("nll-baseline", "car") == 0.0);
  CHECK(report.iou("nll-plus", "car") > 0.5);
  CHECK_THROWS_AS(report.row("nll-max"), ValidationError);

  const Json doc = report.to_json();
  CHECK(doc["models"].size() == 5);
  CHECK(report.to_table().find("nll-plus") != std::string::npos);

  CHECK(dump_json(run_unlabeled_concept_experiment(config, {"nll-plus"}).to_json()["models"][0]) ==
        dump_json(doc["models"][3]));
  CHECK_THROWS_AS(run_unlabeled_concept_experiment(config, {"unknown"}), ValidationError);
}

}  // TEST_SUITE
