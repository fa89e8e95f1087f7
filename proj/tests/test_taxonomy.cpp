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

#include <random>

#include "support.hpp"
#include "unitax/error.hpp"
#include "unitax/taxonomy.hpp"

using namespace unitax;
using unitax::testing::Instance;

namespace {

struct Builder {
  ConceptUniverse universe;

  ConceptSet set(std::initializer_list<const char*> ids) const {
    ConceptSet s(universe.size());
    for (const char* id : ids) s.insert(*universe.index_of(id));
    return s;
  }

  FlatTaxonomy dataset(const std::string& name,
                       std::initializer_list<std::pair<const char*, std::initializer_list<const char*>>> classes) const {
    FlatTaxonomy t{name, {}};
    for (const auto& [cname, ids] : classes) t.classes.push_back({name, cname, set(ids)});
    return t;
  }
};

std::vector<std::string> mapped_names(const UniversalTaxonomy& u, const std::string& dataset, const std::string& cls) {
  std::vector<std::string> out;
  for (auto t : u.mapping(dataset).at(cls)) out.push_back(u.classes[t].name);
  return out;
}

}  // namespace

TEST_SUITE("taxonomy") {

TEST_CASE("relate on the worked examples") {
  Builder b{ConceptUniverse({"truck", "pickup", "car", "road", "sky"})};
  CHECK(relate(b.set({"truck", "pickup"}), b.set({"car", "pickup"})) == ClassRelation::Overlap);
  CHECK(relate(b.set({"sky"}), b.set({"sky"})) == ClassRelation::Equal);
  CHECK(relate(b.set({"road"}), b.set({"car"})) == ClassRelation::Disjoint);
  CHECK(relate(b.set({"car", "pickup"}), b.set({"car"})) == ClassRelation::SupersetOf);
  CHECK(relate(b.set({"car"}), b.set({"car", "pickup"})) == ClassRelation::SubsetOf);
  CHECK_THROWS_AS(relate(b.set({}), b.set({"car"})), InvalidClassError);
}

TEST_CASE("relate is antisymmetric for containment and symmetric otherwise") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    ConceptSet a(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 2) a.insert(i);
      if (rng() % 2) c.insert(i);
    }
    if (a.empty() || c.empty()) continue;
    const auto ab = relate(a, c);
    const auto ba = relate(c, a);
    switch (ab) {
      case ClassRelation::SupersetOf: CHECK(ba == ClassRelation::SubsetOf); break;
      case ClassRelation::SubsetOf: CHECK(ba == ClassRelation::SupersetOf); break;
      default: CHECK(ba == ab);
    }
  }
}

TEST_CASE("validate_flat reports overlaps, duplicate names and empty classes") {
  Builder b{ConceptUniverse({"road", "marking", "sky"})};
  CHECK(validate_flat(b.dataset("ok", {{"road", {"road"}}, {"sky", {"sky"}}})).ok());

  auto overlap = validate_flat(b.dataset("x", {{"road", {"road", "marking"}}, {"marking", {"marking"}}}));
  REQUIRE(overlap.violations.size() == 1);
  CHECK(overlap.violations[0].kind == FlatViolation::Kind::Overlap);
  CHECK(overlap.violations[0].first == 0);
  CHECK(overlap.violations[0].second == 1);

  auto dup = validate_flat(b.dataset("x", {{"car", {"road"}}, {"car", {"sky"}}}));
  REQUIRE(dup.violations.size() == 1);
  CHECK(dup.violations[0].kind == FlatViolation::Kind::DuplicateName);

  auto empty = validate_flat(b.dataset("x", {{"nothing", {}}}));
  REQUIRE(empty.violations.size() == 1);
  CHECK(empty.violations[0].kind == FlatViolation::Kind::EmptyClass);
}

TEST_CASE("rule 1: equal classes merge") {
  Builder b{ConceptUniverse({"sky"})};
  std::vector<FlatTaxonomy> in = {b.dataset("wd", {{"sky", {"sky"}}}), b.dataset("cs", {{"sky", {"sky"}}})};
  auto r = compile_universal(b.universe, in);
  REQUIRE(r.universal.classes.size() == 1);
  CHECK(r.universal.classes[0].name == "sky");
  CHECK(mapped_names(r.universal, "wd", "sky") == std::vector<std::string>{"sky"});
  CHECK(mapped_names(r.universal, "cs", "sky") == std::vector<std::string>{"sky"});
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].rule == RewriteRule::Merge);
}

TEST_CASE("rule 2: a superset is split into the subset and the rest") {
  Builder b{ConceptUniverse({"car", "van"})};
  std::vector<FlatTaxonomy> in = {b.dataset("kitti", {{"car", {"car", "van"}}}), b.dataset("x", {{"car", {"car"}}})};
  auto r = compile_universal(b.universe, in);
  REQUIRE(r.universal.classes.size() == 2);
  CHECK(r.universal.classes[0].name == "car");
  CHECK(r.universal.classes[1].name == "van");
  CHECK(mapped_names(r.universal, "kitti", "car") == std::vector<std::string>{"car", "van"});
  CHECK(mapped_names(r.universal, "x", "car") == std::vector<std::string>{"car"});
  CHECK(r.steps.front().rule == RewriteRule::SplitSuperset);
}

TEST_CASE("rule 3: overlapping classes become three disjoint classes") {
  Builder b{ConceptUniverse({"truck", "pickup", "trailer"})};
  std::vector<FlatTaxonomy> in = {b.dataset("viper", {{"truck", {"truck", "pickup"}}}),
                                  b.dataset("ade", {{"truck", {"truck", "trailer"}}})};
  auto r = compile_universal(b.universe, in);
  REQUIRE(r.universal.classes.size() == 3);
  CHECK(r.universal.classes[0].name == "truck");
  CHECK(r.universal.classes[1].name == "pickup");
  CHECK(r.universal.classes[2].name == "trailer");
  CHECK(mapped_names(r.universal, "viper", "truck") == std::vector<std::string>{"truck", "pickup"});
  CHECK(mapped_names(r.universal, "ade", "truck") == std::vector<std::string>{"truck", "trailer"});
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].rule == RewriteRule::SplitOverlap);
  CHECK(r.steps[0].working_size == 3);
}

TEST_CASE("signature partition on the hand-enumerated example") {
  Builder b{ConceptUniverse({"t", "p", "r", "unused"})};
  std::vector<FlatTaxonomy> in = {b.dataset("a", {{"x", {"t", "p"}}}), b.dataset("b", {{"y", {"t", "r"}}})};
  auto u = signature_partition(b.universe, in);
  REQUIRE(u.classes.size() == 3);
  CHECK(u.classes[0].extent == b.set({"t"}));
  CHECK(u.classes[1].extent == b.set({"p"}));
  CHECK(u.classes[2].extent == b.set({"r"}));
}

TEST_CASE("a single dataset compiles to itself") {
  Builder b{ConceptUniverse({"road", "sidewalk", "car", "sky"})};
  std::vector<FlatTaxonomy> in = {b.dataset("toy", {{"ground", {"road", "sidewalk"}}, {"car", {"car"}}})};
  for (const auto& u : {build_universal(b.universe, in), signature_partition(b.universe, in)}) {
    REQUIRE(u.classes.size() == 2);
    CHECK(u.classes[0].extent == in[0].classes[0].extent);
    CHECK(u.classes[1].extent == in[0].classes[1].extent);
    CHECK(u.classes[0].name == "road+sidewalk");
  }
}

TEST_CASE("invalid input is rejected") {
  Builder b{ConceptUniverse({"road", "marking"})};
  std::vector<FlatTaxonomy> bad = {b.dataset("x", {{"road", {"road", "marking"}}, {"marking", {"marking"}}})};
  CHECK_THROWS_AS(build_universal(b.universe, bad), ValidationError);
  CHECK_THROWS_AS(signature_partition(b.universe, bad), ValidationError);
  std::vector<FlatTaxonomy> none;
  CHECK_THROWS_AS(build_universal(b.universe, none), ValidationError);
}

TEST_CASE("apply_names renames exact extents only") {
  Builder b{ConceptUniverse({"truck", "pickup", "trailer"})};
  std::vector<FlatTaxonomy> in = {b.dataset("viper", {{"truck", {"truck", "pickup"}}}),
                                  b.dataset("ade", {{"truck", {"truck", "trailer"}}})};
  auto u = build_universal(b.universe, in);
  std::vector<ExtentName> names = {{b.set({"pickup"}), "wd-pickup"}, {b.set({"truck", "pickup"}), "unused"}};
  apply_names(u, names);
  CHECK(u.classes[1].name == "wd-pickup");
  CHECK(u.classes[0].name == "truck");
}

TEST_CASE("check_universal catches broken taxonomies") {
  Builder b{ConceptUniverse({"truck", "pickup", "trailer"})};
  std::vector<FlatTaxonomy> in = {b.dataset("viper", {{"truck", {"truck", "pickup"}}}),
                                  b.dataset("ade", {{"truck", {"truck", "trailer"}}})};
  auto good = build_universal(b.universe, in);
  CHECK(check_universal(good, in).empty());

  auto overlapping = good;
  overlapping.classes[0].extent.insert(1);
  CHECK_FALSE(check_universal(overlapping, in).empty());

  auto uncovered = good;
  uncovered.classes.pop_back();
  CHECK_FALSE(check_universal(uncovered, in).empty());

  auto coarse = good;  // a class straddling a dataset class boundary
  coarse.classes[0].extent.insert(2);
  coarse.classes.pop_back();
  CHECK_FALSE(check_universal(coarse, in).empty());
}

TEST_CASE("compiled taxonomies match the signature oracle on random instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    CAPTURE(trial);
    const std::size_t datasets = 2 + rng() % 3;
    const std::size_t concepts = 1 + rng() % 32;
    Instance inst = testing::random_instance(rng, datasets, concepts, 10);

    auto compiled = compile_universal(inst.universe, inst.datasets);
    const auto& u = compiled.universal;
    const auto oracle = signature_partition(inst.universe, inst.datasets);

    CHECK(testing::blocks_of(u) == testing::membership_blocks(inst));
    REQUIRE(u.classes.size() == oracle.classes.size());
    for (std::size_t k = 0; k < u.classes.size(); ++k) {
      CHECK(u.classes[k].extent == oracle.classes[k].extent);
      CHECK(u.classes[k].name == oracle.classes[k].name);
    }
    for (std::size_t d = 0; d < datasets; ++d) CHECK(u.mappings[d].targets == oracle.mappings[d].targets);
    CHECK(check_universal(u, inst.datasets).empty());

    // Every rewrite strictly lowers the total extent size.
    std::size_t previous = compiled.initial_potential;
    for (const auto& step : compiled.steps) {
      CHECK(step.potential < previous);
      previous = step.potential;
    }
  }
}

TEST_CASE("compiling a universal taxonomy again is the identity") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    Instance inst = testing::random_instance(rng, 3, 20, 6);
    const auto u = build_universal(inst.universe, inst.datasets);
    std::vector<FlatTaxonomy> again = {u.as_flat()};
    const auto v = build_universal(inst.universe, again);
    REQUIRE(v.classes.size() == u.classes.size());
    for (std::size_t k = 0; k < u.classes.size(); ++k) {
      CHECK(v.classes[k].extent == u.classes[k].extent);
      CHECK(v.classes[k].name == u.classes[k].name);
    }
  }
}

TEST_CASE("compilation is deterministic") {
  std::mt19937_64 rng(5);
  Instance inst = testing::random_instance(rng, 4, 32, 10);
  const auto a = compile_universal(inst.universe, inst.datasets);
  const auto b = compile_universal(inst.universe, inst.datasets);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t k = 0; k < a.universal.classes.size(); ++k) {
    CHECK(a.universal.classes[k].name == b.universal.classes[k].name);
  }
}

}  // TEST_SUITE
