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

// Generators and reference implementations shared by the test binaries.
// Oracles here are written from the definitions, without calling the code
// they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "unitax/concept_set.hpp"
#include "unitax/taxonomy.hpp"

namespace unitax::testing {

inline ConceptUniverse numbered_universe(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
  return ConceptUniverse(ids);
}

struct Instance {
  ConceptUniverse universe;
  std::vector<FlatTaxonomy> datasets;
};

/// Random flat taxonomies: each dataset covers a random subset of the
/// universe and splits it into at most `max_classes` non-empty classes.
inline Instance random_instance(std::mt19937_64& rng, std::size_t num_datasets, std::size_t num_concepts,
                                std::size_t max_classes) {
  Instance inst{numbered_universe(num_concepts), {}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t d = 0; d < num_datasets; ++d) {
    const double coverage = 0.4 + 0.6 * unit(rng);
    std::vector<std::size_t> covered;
    for (std::size_t c = 0; c < num_concepts; ++c) {
      if (unit(rng) < coverage) covered.push_back(c);
    }
    if (covered.empty()) covered.push_back(rng() % num_concepts);
    const std::size_t k = 1 + rng() % std::min(max_classes, covered.size());
    std::shuffle(covered.begin(), covered.end(), rng);
    std::vector<std::vector<std::size_t>> groups(k);
    for (std::size_t i = 0; i < covered.size(); ++i) groups[i < k ? i : rng() % k].push_back(covered[i]);

    FlatTaxonomy t{"d" + std::to_string(d), {}};
    for (std::size_t g = 0; g < k; ++g) {
      t.classes.push_back({t.name, "k" + std::to_string(g), ConceptSet(num_concepts, groups[g])});
    }
    inst.datasets.push_back(std::move(t));
  }
  return inst;
}

/// The partition of covered concepts into blocks of identical class
/// membership, as sorted vectors of concept indices.
inline std::set<std::vector<std::size_t>> membership_blocks(const Instance& inst) {
  std::map<std::vector<int>, std::vector<std::size_t>> by_signature;
  for (std::size_t c = 0; c < inst.universe.size(); ++c) {
    std::vector<int> sig;
    bool covered = false;
    for (const auto& d : inst.datasets) {
      int owner = -1;
      for (std::size_t k = 0; k < d.classes.size(); ++k) {
        if (d.classes[k].extent.contains(c)) owner = static_cast<int>(k);
      }
      covered = covered || owner >= 0;
      sig.push_back(owner);
    }
    if (covered) by_signature[sig].push_back(c);
  }
  std::set<std::vector<std::size_t>> blocks;
  for (auto& [sig, members] : by_signature) blocks.insert(members);
  return blocks;
}

inline std::set<std::vector<std::size_t>> blocks_of(const UniversalTaxonomy& u) {
  std::set<std::vector<std::size_t>> blocks;
  for (const auto& c : u.classes) blocks.insert(c.extent.members());
  return blocks;
}

/// Softmax by the textbook formula. Only valid for moderate logits.
inline std::vector<double> naive_softmax(const std::vector<double>& s) {
  double z = 0.0;
  for (double v : s) z += std::exp(v);
  std::vector<double> p;
  for (double v : s) p.push_back(std::exp(v) / z);
  return p;
}

/// Central finite-difference gradient of f at x.
inline std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                            std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f(x);
    x[i] = keep - h;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<double> random_logits(std::mt19937_64& rng, std::size_t n, double range) {
  std::uniform_real_distribution<double> u(-range, range);
  std::vector<double> s(n);
  for (auto& v : s) v = u(rng);
  return s;
}

/// `k` distinct indices below `n`, ascending.
inline std::vector<std::size_t> random_subset(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

/// Random point of the probability simplex (normalized exponentials).
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += (v = e(rng));
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace unitax::testing
