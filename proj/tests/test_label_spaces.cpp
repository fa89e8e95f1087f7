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

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "unitax/error.hpp"
#include "unitax/label_spaces.hpp"
#include "unitax/taxonomy_io.hpp"

using namespace unitax;

namespace {

TaxonomySet fixture(const char* name) { return load_taxonomy(std::string(UNITAX_FIXTURE_DIR) + "/" + name); }

std::size_t column(const MappingMatrix& m, const std::string& name) {
  const auto& cols = m.col_names();
  auto it = std::find(cols.begin(), cols.end(), name);
  REQUIRE(it != cols.end());
  return static_cast<std::size_t>(it - cols.begin());
}

std::size_t row(const MappingMatrix& m, const std::string& name) {
  const auto& rows = m.row_names();
  auto it = std::find(rows.begin(), rows.end(), name);
  REQUIRE(it != rows.end());
  return static_cast<std::size_t>(it - rows.begin());
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_SUITE("label_spaces") {

TEST_CASE("training taxonomy sizes on the two fixtures") {
  const auto city = fixture("city_vistas.json");
  CHECK(build_naive_concat(city.universe, city.datasets).size() == 93);
  CHECK(build_partial_merge(city.universe, city.datasets).size() == 72);
  CHECK(build_training_taxonomy(TaxonomyKind::Universal, city.universe, city.datasets).size() == 65);

  const auto wd2 = fixture("wd2_vistas.json");
  CHECK(build_naive_concat(wd2.universe, wd2.datasets).size() == 98);
  CHECK(build_partial_merge(wd2.universe, wd2.datasets).size() == 76);
  CHECK(build_training_taxonomy(TaxonomyKind::Universal, wd2.universe, wd2.datasets).size() == 67);
}

TEST_CASE("naive concatenation prefixes names and maps one to one") {
  const auto city = fixture("city_vistas.json");
  const auto t = build_naive_concat(city.universe, city.datasets);
  CHECK(t.classes.front().name == "cityscapes-road");
  const auto m = training_matrix(t, "vistas");
  for (std::size_t r = 0; r < m.rows(); ++r) CHECK(m.row_sum(r) == 1);
}

TEST_CASE("partial merge merges by extent, not by name") {
  ConceptUniverse u({"a", "b", "c"});
  std::vector<FlatTaxonomy> in = {
      {"x", {{"x", "car", ConceptSet(3, {0})}, {"x", "sky", ConceptSet(3, {1})}}},
      {"y", {{"y", "auto", ConceptSet(3, {0})}, {"y", "sky", ConceptSet(3, {1, 2})}}}};
  const auto t = build_partial_merge(u, in);
  REQUIRE(t.size() == 3);
  CHECK(t.classes[0].name == "x-car");  // names differ: the first dataset's name is kept
  CHECK(t.label_set(1, 0) == std::vector<std::size_t>{0});
  CHECK(t.label_set(1, 1) == std::vector<std::size_t>{2});

  std::vector<FlatTaxonomy> same = {{"x", {{"x", "sky", ConceptSet(3, {1})}}}, {"y", {{"y", "sky", ConceptSet(3, {1})}}}};
  CHECK(build_partial_merge(u, same).classes[0].name == "sky");

  std::vector<FlatTaxonomy> distinct = {{"x", {{"x", "a", ConceptSet(3, {0})}}}, {"y", {{"y", "b", ConceptSet(3, {1})}}}};
  CHECK(build_partial_merge(u, distinct).size() == build_naive_concat(u, distinct).size());
}

TEST_CASE("a single dataset gives the same classes under every kind") {
  const auto single = fixture("single.json");
  for (auto kind : {TaxonomyKind::NaiveConcat, TaxonomyKind::PartialMerge, TaxonomyKind::Universal}) {
    const auto t = build_training_taxonomy(kind, single.universe, single.datasets);
    REQUIRE(t.size() == single.datasets[0].classes.size());
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(t.classes[k].extent == single.datasets[0].classes[k].extent);
  }
}

TEST_CASE("universal training matrices have unit column sums over covered classes") {
  const auto city = fixture("city_vistas.json");
  const auto t = build_training_taxonomy(TaxonomyKind::Universal, city.universe, city.datasets);
  const auto m = training_matrix(t, "cityscapes");
  for (std::size_t c = 0; c < m.cols(); ++c) CHECK(m.column_sum(c) <= 1);
  const auto road = row(m, "road");
  CHECK(m.row_sum(road) == 9);
  CHECK(m.at(road, column(m, "object--pothole")));
  CHECK(m.at(road, column(m, "marking--general")));

  const auto v = training_matrix(t, "vistas");
  for (std::size_t c = 0; c < v.cols(); ++c) CHECK(v.column_sum(c) == 1);
  CHECK_THROWS_AS(training_matrix(t, "kitti"), ValidationError);
}

TEST_CASE("eval mapping: sign parts map to the sign, unmapped classes to void") {
  const auto city = fixture("city_vistas.json");
  const auto t = build_naive_concat(city.universe, city.datasets);
  const auto m = eval_mapping(t, city.dataset("cityscapes"));
  const auto sign = row(m, "traffic-sign");
  for (const char* c : {"cityscapes-traffic-sign", "vistas-object--traffic-sign--front",
                        "vistas-object--traffic-sign--back", "vistas-object--support--traffic-sign-frame"}) {
    CHECK(m.at(sign, column(m, c)));
  }
  CHECK(m.at(m.void_row(), column(m, "vistas-void--ego-vehicle")));
  CHECK(m.column_sum(column(m, "vistas-void--ego-vehicle")) == 1);

  // A column is in the void row exactly when no other row has it.
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::size_t others = 0;
    for (std::size_t r = 0; r < m.void_row(); ++r) others += m.at(r, c) ? 1 : 0;
    CHECK(m.at(m.void_row(), c) == (others == 0));
  }
}

TEST_CASE("eval mapping onto the training taxonomy itself is the identity") {
  const auto single = fixture("single.json");
  const auto t = build_naive_concat(single.universe, single.datasets);
  const auto m = eval_mapping(t, single.datasets[0]);
  for (std::size_t r = 0; r + 1 < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) CHECK(m.at(r, c) == (r == c));
  }
  CHECK(m.row_sum(m.void_row()) == 0);
}

TEST_CASE("scores are sums of mapped probabilities") {
  ConceptUniverse u({"road", "marking", "sky"});
  std::vector<FlatTaxonomy> in = {{"cs", {{"cs", "road", ConceptSet(3, {0, 1})}, {"cs", "sky", ConceptSet(3, {2})}}},
                                  {"fine", {{"fine", "road", ConceptSet(3, {0})},
                                            {"fine", "marking", ConceptSet(3, {1})},
                                            {"fine", "sky", ConceptSet(3, {2})}}}};
  const auto t = build_training_taxonomy(TaxonomyKind::Universal, u, in);
  const std::vector<double> p(3, 1.0 / 3.0);
  const auto s = dataset_scores(p, training_matrix(t, "cs"));
  CHECK(s[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS_AS(dataset_scores(std::vector<double>{0.5, 0.5}, training_matrix(t, "cs")), ShapeError);
  CHECK_THROWS_AS(dataset_scores(std::vector<double>{0.5, 0.6, -0.1}, training_matrix(t, "cs")), ValidationError);
  CHECK_THROWS_AS(dataset_scores(std::vector<double>{0.5, 0.5, 0.5}, training_matrix(t, "cs")), ValidationError);
}

TEST_CASE("naive concatenation: the pothole score includes the coarse road") {
  const auto city = fixture("city_vistas.json");
  const auto t = build_naive_concat(city.universe, city.datasets);
  const auto m = eval_mapping(t, city.dataset("vistas"));
  std::mt19937_64 rng(3);
  const auto p = testing::random_simplex(rng, t.size());
  const auto s = dataset_scores(p, m);
  const double expected = p[column(m, "cityscapes-road")] + p[column(m, "vistas-object--pothole")];
  CHECK(s[row(m, "object--pothole")] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(sum(s) > 1.0);
  CHECK(sum(renormalize(s)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("renormalize") {
  const auto r = renormalize(std::vector<double>{0.2, 0.6});
  CHECK(r[0] == doctest::Approx(0.25));
  CHECK(r[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(renormalize(std::vector<double>{0.0, 0.0}), DegenerateInputError);
}

TEST_CASE("universal scores are distributions; baselines after renormalizing") {
  const auto city = fixture("city_vistas.json");
  std::mt19937_64 rng(17);
  for (auto kind : {TaxonomyKind::Universal, TaxonomyKind::NaiveConcat, TaxonomyKind::PartialMerge}) {
    const auto t = build_training_taxonomy(kind, city.universe, city.datasets);
    for (const auto& d : city.datasets) {
      // Universal classes outside the dataset land in the void row.
      const auto eval = eval_mapping(t, d);
      for (int trial = 0; trial < 100; ++trial) {
        const auto p = testing::random_simplex(rng, t.size());
        if (kind == TaxonomyKind::Universal) {
          const auto s = dataset_scores(p, eval);
          CHECK(std::abs(sum(s) - 1.0) < 1e-9);
          const auto r = renormalize(s);
          for (std::size_t k = 0; k < s.size(); ++k) CHECK(std::abs(r[k] - s[k]) < 1e-12);
        }
        CHECK(std::abs(sum(renormalize(dataset_scores(p, eval))) - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("predictions through the evaluation mapping") {
  const auto city = fixture("city_vistas.json");
  const auto t = build_training_taxonomy(TaxonomyKind::Universal, city.universe, city.datasets);
  const auto m = eval_mapping(t, city.dataset("cityscapes"));
  std::vector<double> p(t.size(), 0.0);
  p[column(m, "object--manhole")] = 1.0;
  CHECK(m.row_names()[predict_dataset_class(p, m)] == "road");

  std::fill(p.begin(), p.end(), 0.0);
  p[column(m, "void--ego-vehicle")] = 1.0;
  CHECK(predict_dataset_class(p, m) == m.void_row());

  // Ties go to the lowest row.
  std::fill(p.begin(), p.end(), 0.0);
  p[column(m, "nature--sky")] = 0.5;
  p[column(m, "nature--terrain")] = 0.5;
  CHECK(m.row_names()[predict_dataset_class(p, m)] == "terrain");
}

TEST_CASE("argmax of the scores is unchanged by positive scaling") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = testing::random_simplex(rng, 6);
    const double scale = 0.01 + 100.0 * testing::random_simplex(rng, 2)[0];
    auto scaled = s;
    for (auto& v : scaled) v *= scale;
    CHECK(std::max_element(s.begin(), s.end()) - s.begin() ==
          std::max_element(scaled.begin(), scaled.end()) - scaled.begin());
    const auto r = renormalize(scaled);
    CHECK(std::max_element(r.begin(), r.end()) - r.begin() == std::max_element(s.begin(), s.end()) - s.begin());
  }
}

TEST_CASE("matrix exports") {
  MappingMatrix m({"a", "void"}, {"x", "y"}, true);
  m.set(0, 0);
  m.set(1, 1);
  CHECK(m.to_csv() == "1,0\n0,1\n");
  CHECK(m.to_json().dump() == R"({"rows":["a","void"],"cols":["x","y"],"void":true,"data":[[1,0],[0,1]]})");
}

TEST_CASE("taxonomy kind names") {
  for (auto kind : {TaxonomyKind::NaiveConcat, TaxonomyKind::PartialMerge, TaxonomyKind::Universal}) {
    CHECK(parse_taxonomy_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_taxonomy_kind("flat"), ValidationError);
}

}  // TEST_SUITE
