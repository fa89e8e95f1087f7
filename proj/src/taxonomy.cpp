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

#include "unitax/taxonomy.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "unitax/error.hpp"

namespace unitax {

std::optional<std::size_t> FlatTaxonomy::find(std::string_view class_name) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].name == class_name) return i;
  }
  return std::nullopt;
}

std::size_t FlatTaxonomy::index_of(std::string_view class_name) const {
  auto i = find(class_name);
  if (!i) {
    throw ValidationError("dataset '" + name + "' has no class '" + std::string(class_name) + "'");
  }
  return *i;
}

std::string_view to_string(ClassRelation relation) {
  switch (relation) {
    case ClassRelation::Equal: return "equal";
    case ClassRelation::SupersetOf: return "superset";
    case ClassRelation::SubsetOf: return "subset";
    case ClassRelation::Overlap: return "overlap";
    case ClassRelation::Disjoint: return "disjoint";
  }
  return "?";
}

ClassRelation relate(const ConceptSet& a, const ConceptSet& b) {
  if (a.empty() || b.empty()) throw InvalidClassError("relate: class with empty extent");
  if (!a.intersects(b)) return ClassRelation::Disjoint;
  const bool a_in_b = a.is_subset_of(b);
  const bool b_in_a = b.is_subset_of(a);
  if (a_in_b && b_in_a) return ClassRelation::Equal;
  if (b_in_a) return ClassRelation::SupersetOf;
  if (a_in_b) return ClassRelation::SubsetOf;
  return ClassRelation::Overlap;
}

FlatReport validate_flat(const FlatTaxonomy& taxonomy) {
  FlatReport report;
  const auto& cls = taxonomy.classes;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    if (cls[i].extent.empty()) {
      report.violations.push_back({FlatViolation::Kind::EmptyClass, i, i,
                                   taxonomy.name + ": class '" + cls[i].name + "' is empty"});
    }
  }
  for (std::size_t i = 0; i < cls.size(); ++i) {
    for (std::size_t j = i + 1; j < cls.size(); ++j) {
      if (cls[i].name == cls[j].name) {
        report.violations.push_back({FlatViolation::Kind::DuplicateName, i, j,
                                     taxonomy.name + ": duplicate class name '" + cls[i].name + "'"});
      }
      if (cls[i].extent.intersects(cls[j].extent)) {
        report.violations.push_back({FlatViolation::Kind::Overlap, i, j,
                                     taxonomy.name + ": classes '" + cls[i].name + "' and '" +
                                         cls[j].name + "' overlap"});
      }
    }
  }
  return report;
}

const FlatTaxonomy& TaxonomySet::dataset(std::string_view name) const {
  for (const auto& d : datasets) {
    if (d.name == name) return d;
  }
  throw ValidationError("unknown dataset '" + std::string(name) + "'");
}

const std::vector<std::size_t>& DatasetMapping::at(std::string_view class_name) const {
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == class_name) return targets[i];
  }
  throw ValidationError("mapping for '" + dataset + "' has no class '" + std::string(class_name) + "'");
}

const DatasetMapping& UniversalTaxonomy::mapping(std::string_view dataset) const {
  for (const auto& m : mappings) {
    if (m.dataset == dataset) return m;
  }
  throw ValidationError("unknown dataset '" + std::string(dataset) + "'");
}

std::optional<std::size_t> UniversalTaxonomy::find(std::string_view class_name) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].name == class_name) return i;
  }
  return std::nullopt;
}

FlatTaxonomy UniversalTaxonomy::as_flat(std::string name) const {
  FlatTaxonomy flat{std::move(name), {}};
  for (const auto& u : classes) flat.classes.push_back({flat.name, u.name, u.extent});
  return flat;
}

std::string extent_name(const ConceptUniverse& universe, const ConceptSet& extent) {
  auto ids = concept_ids(universe, extent);
  std::sort(ids.begin(), ids.end());
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += '+';
    out += id;
  }
  return out;
}

void apply_names(UniversalTaxonomy& universal, std::span<const ExtentName> names) {
  for (auto& u : universal.classes) {
    for (const auto& n : names) {
      if (n.extent == u.extent) u.name = n.name;
    }
  }
}

namespace {

void require_inputs(const ConceptUniverse& universe, std::span<const FlatTaxonomy> taxonomies) {
  if (taxonomies.empty()) throw ValidationError("no taxonomies given");
  for (const auto& t : taxonomies) {
    auto report = validate_flat(t);
    if (!report.ok()) throw ValidationError(report.violations.front().message);
    for (const auto& c : t.classes) {
      if (c.extent.universe_size() != universe.size()) {
        throw ValidationError(t.name + ": class '" + c.name + "' is not over the shared universe");
      }
    }
  }
}

// Sorts classes by lowest concept, names them, and derives the per-dataset
// mapping by containment. Shared by both constructions so that their outputs
// are directly comparable.
UniversalTaxonomy finalize(const ConceptUniverse& universe, std::vector<ConceptSet> extents,
                           std::span<const FlatTaxonomy> taxonomies) {
  std::sort(extents.begin(), extents.end(),
            [](const ConceptSet& a, const ConceptSet& b) { return a.first() < b.first(); });
  UniversalTaxonomy out;
  out.universe = universe;
  for (auto& e : extents) out.classes.push_back({extent_name(universe, e), std::move(e)});
  for (const auto& t : taxonomies) {
    DatasetMapping m{t.name, {}, {}};
    for (const auto& c : t.classes) {
      std::vector<std::size_t> targets;
      for (std::size_t u = 0; u < out.classes.size(); ++u) {
        if (out.classes[u].extent.is_subset_of(c.extent)) targets.push_back(u);
      }
      m.class_names.push_back(c.name);
      m.targets.push_back(std::move(targets));
    }
    out.mappings.push_back(std::move(m));
  }
  return out;
}

std::size_t total_extent(const std::vector<ConceptSet>& arena, const std::vector<std::size_t>& working) {
  std::size_t sum = 0;
  for (auto id : working) sum += arena[id].count();
  return sum;
}

}  // namespace

CompileResult compile_universal(const ConceptUniverse& universe,
                                std::span<const FlatTaxonomy> taxonomies) {
  require_inputs(universe, taxonomies);

  // Nodes live in an arena; `working` holds arena ids in scan order.
  std::vector<ConceptSet> arena;
  std::vector<std::size_t> working;
  // For every input class (flattened in dataset order), the arena ids of the
  // working classes it currently maps to.
  std::vector<std::vector<std::size_t>> class_targets;
  for (const auto& t : taxonomies) {
    for (const auto& c : t.classes) {
      arena.push_back(c.extent);
      working.push_back(arena.size() - 1);
      class_targets.push_back({arena.size() - 1});
    }
  }

  auto substitute = [&](std::size_t old_id, std::initializer_list<std::size_t> replacement) {
    for (auto& targets : class_targets) {
      auto it = std::find(targets.begin(), targets.end(), old_id);
      if (it == targets.end()) continue;
      targets.erase(it);
      for (auto r : replacement) {
        if (std::find(targets.begin(), targets.end(), r) == targets.end()) targets.push_back(r);
      }
    }
  };

  CompileResult result;
  result.initial_potential = total_extent(arena, working);

  auto rule_applies = [](RewriteRule rule, ClassRelation rel) {
    switch (rule) {
      case RewriteRule::Merge: return rel == ClassRelation::Equal;
      case RewriteRule::SplitSuperset:
        return rel == ClassRelation::SupersetOf || rel == ClassRelation::SubsetOf;
      case RewriteRule::SplitOverlap: return rel == ClassRelation::Overlap;
    }
    return false;
  };

  for (;;) {
    std::optional<std::pair<std::size_t, std::size_t>> hit;
    RewriteRule rule = RewriteRule::Merge;
    for (auto candidate : {RewriteRule::Merge, RewriteRule::SplitSuperset, RewriteRule::SplitOverlap}) {
      for (std::size_t i = 0; i < working.size() && !hit; ++i) {
        for (std::size_t j = i + 1; j < working.size() && !hit; ++j) {
          if (rule_applies(candidate, relate(arena[working[i]], arena[working[j]]))) hit = {i, j};
        }
      }
      if (hit) {
        rule = candidate;
        break;
      }
    }
    if (!hit) break;

    auto [i, j] = *hit;
    const std::size_t a = working[i];
    const std::size_t b = working[j];
    switch (rule) {
      case RewriteRule::Merge: {
        arena.push_back(arena[a]);
        const std::size_t merged = arena.size() - 1;
        working[i] = merged;
        working.erase(working.begin() + static_cast<std::ptrdiff_t>(j));
        substitute(a, {merged});
        substitute(b, {merged});
        break;
      }
      case RewriteRule::SplitSuperset: {
        const bool a_is_super = arena[b].is_subset_of(arena[a]);
        const std::size_t super = a_is_super ? a : b;
        const std::size_t sub = a_is_super ? b : a;
        const std::size_t pos = a_is_super ? i : j;
        arena.push_back(arena[super] - arena[sub]);
        const std::size_t rest = arena.size() - 1;
        working[pos] = rest;
        substitute(super, {sub, rest});
        break;
      }
      case RewriteRule::SplitOverlap: {
        ConceptSet only_a = arena[a] - arena[b];
        ConceptSet only_b = arena[b] - arena[a];
        ConceptSet both = arena[a] & arena[b];
        arena.push_back(std::move(only_a));
        const std::size_t id_a = arena.size() - 1;
        arena.push_back(std::move(only_b));
        const std::size_t id_b = arena.size() - 1;
        arena.push_back(std::move(both));
        const std::size_t id_both = arena.size() - 1;
        working[i] = id_a;
        working[j] = id_b;
        working.push_back(id_both);
        substitute(a, {id_a, id_both});
        substitute(b, {id_b, id_both});
        break;
      }
    }
    result.steps.push_back({rule, i, j, working.size(), total_extent(arena, working)});
  }

  std::vector<ConceptSet> extents;
  extents.reserve(working.size());
  for (auto id : working) extents.push_back(arena[id]);
  result.universal = finalize(universe, std::move(extents), taxonomies);

  // The transitive rewrite mapping must agree with containment.
  std::size_t flat_index = 0;
  for (std::size_t d = 0; d < taxonomies.size(); ++d) {
    for (std::size_t c = 0; c < taxonomies[d].classes.size(); ++c, ++flat_index) {
      ConceptSet mapped(universe.size());
      for (auto id : class_targets[flat_index]) mapped |= arena[id];
      if (mapped != taxonomies[d].classes[c].extent ||
          class_targets[flat_index].size() != result.universal.mappings[d].targets[c].size()) {
        throw Error("internal: rewrite mapping of '" + taxonomies[d].classes[c].name +
                    "' disagrees with containment");
      }
    }
  }
  return result;
}

UniversalTaxonomy build_universal(const ConceptUniverse& universe,
                                  std::span<const FlatTaxonomy> taxonomies) {
  return compile_universal(universe, taxonomies).universal;
}

UniversalTaxonomy signature_partition(const ConceptUniverse& universe,
                                      std::span<const FlatTaxonomy> taxonomies) {
  require_inputs(universe, taxonomies);
  // signature: for each dataset, index of the class containing the concept or -1
  std::map<std::vector<long>, std::size_t> slot;
  std::vector<ConceptSet> extents;
  for (std::size_t concept_index = 0; concept_index < universe.size(); ++concept_index) {
    std::vector<long> signature(taxonomies.size(), -1);
    bool covered = false;
    for (std::size_t d = 0; d < taxonomies.size(); ++d) {
      const auto& cls = taxonomies[d].classes;
      for (std::size_t c = 0; c < cls.size(); ++c) {
        if (cls[c].extent.contains(concept_index)) {
          signature[d] = static_cast<long>(c);
          covered = true;
          break;
        }
      }
    }
    if (!covered) continue;
    auto [it, inserted] = slot.emplace(std::move(signature), extents.size());
    if (inserted) extents.emplace_back(universe.size());
    extents[it->second].insert(concept_index);
  }
  return finalize(universe, std::move(extents), taxonomies);
}

std::vector<std::string> check_universal(const UniversalTaxonomy& universal,
                                         std::span<const FlatTaxonomy> taxonomies) {
  std::vector<std::string> problems;
  const auto& u = universal.classes;
  const std::size_t n = universal.universe.size();

  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i].extent.empty()) problems.push_back("universal class '" + u[i].name + "' is empty");
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      if (u[i].extent.intersects(u[j].extent)) {
        problems.push_back("universal classes '" + u[i].name + "' and '" + u[j].name + "' intersect");
      }
    }
  }

  ConceptSet covered_by_universal(n);
  for (const auto& c : u) covered_by_universal |= c.extent;
  ConceptSet covered_by_datasets(n);
  for (const auto& t : taxonomies) {
    for (const auto& c : t.classes) covered_by_datasets |= c.extent;
  }
  if (covered_by_universal != covered_by_datasets) {
    problems.push_back("universal classes do not cover exactly the dataset classes");
  }

  for (const auto& t : taxonomies) {
    const DatasetMapping* mapping = nullptr;
    for (const auto& m : universal.mappings) {
      if (m.dataset == t.name) mapping = &m;
    }
    if (mapping == nullptr) {
      problems.push_back("no mapping for dataset '" + t.name + "'");
      continue;
    }
    for (std::size_t ci = 0; ci < t.classes.size(); ++ci) {
      const auto& c = t.classes[ci];
      for (const auto& uc : u) {
        if (!uc.extent.disjoint(c.extent) && !uc.extent.is_subset_of(c.extent)) {
          problems.push_back("universal class '" + uc.name + "' partially overlaps " + t.name + "-" + c.name);
        }
      }
      if (ci >= mapping->targets.size() || mapping->class_names[ci] != c.name) {
        problems.push_back("mapping of '" + t.name + "' does not list class '" + c.name + "'");
        continue;
      }
      ConceptSet mapped(n);
      for (auto target : mapping->targets[ci]) {
        if (target >= u.size()) {
          problems.push_back("mapping of '" + c.name + "' has an out-of-range target");
          continue;
        }
        if (!u[target].extent.is_subset_of(c.extent)) {
          problems.push_back("'" + c.name + "' maps to '" + u[target].name + "' which it does not contain");
        }
        mapped |= u[target].extent;
      }
      if (mapped != c.extent) {
        problems.push_back("mapped extents of " + t.name + "-" + c.name + " do not union to the class");
      }
    }
  }
  return problems;
}

}  // namespace unitax
