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

#include "unitax/label_spaces.hpp"

#include <cmath>
#include <sstream>

#include "unitax/error.hpp"

namespace unitax {

std::string_view to_string(TaxonomyKind kind) {
  switch (kind) {
    case TaxonomyKind::NaiveConcat: return "naive";
    case TaxonomyKind::PartialMerge: return "merge";
    case TaxonomyKind::Universal: return "universal";
  }
  return "?";
}

TaxonomyKind parse_taxonomy_kind(std::string_view text) {
  if (text == "naive") return TaxonomyKind::NaiveConcat;
  if (text == "merge") return TaxonomyKind::PartialMerge;
  if (text == "universal") return TaxonomyKind::Universal;
  throw ValidationError("unknown taxonomy kind '" + std::string(text) + "'");
}

std::size_t TrainingTaxonomy::dataset_index(std::string_view name) const {
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    if (datasets[d].name == name) return d;
  }
  throw ValidationError("unknown dataset '" + std::string(name) + "'");
}

const std::vector<std::size_t>& TrainingTaxonomy::label_set(std::size_t dataset,
                                                            std::size_t dataset_class) const {
  return train_mapping.at(dataset).at(dataset_class);
}

namespace {

void require_flat(std::span<const FlatTaxonomy> taxonomies) {
  for (const auto& t : taxonomies) {
    auto report = validate_flat(t);
    if (!report.ok()) throw ValidationError(report.violations.front().message);
  }
}

TrainingTaxonomy concat(TaxonomyKind kind, const ConceptUniverse& universe,
                        std::span<const FlatTaxonomy> taxonomies, bool merge_equal) {
  require_flat(taxonomies);
  TrainingTaxonomy out;
  out.kind = kind;
  out.universe = universe;
  out.datasets.assign(taxonomies.begin(), taxonomies.end());
  std::vector<std::vector<std::string>> member_names;  // bare names per training class
  for (const auto& t : taxonomies) {
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& c : t.classes) {
      std::size_t target = out.classes.size();
      if (merge_equal) {
        for (std::size_t k = 0; k < out.classes.size(); ++k) {
          if (out.classes[k].extent == c.extent) {
            target = k;
            break;
          }
        }
      }
      if (target == out.classes.size()) {
        out.classes.push_back({t.name + "-" + c.name, c.extent});
        member_names.push_back({c.name});
      } else {
        member_names[target].push_back(c.name);
      }
      rows.push_back({target});
    }
    out.train_mapping.push_back(std::move(rows));
  }
  for (std::size_t k = 0; k < out.classes.size(); ++k) {
    const auto& names = member_names[k];
    if (names.size() < 2) continue;
    bool same = true;
    for (const auto& n : names) same = same && n == names.front();
    if (same) out.classes[k].name = names.front();
  }
  return out;
}

}  // namespace

TrainingTaxonomy build_naive_concat(const ConceptUniverse& universe,
                                    std::span<const FlatTaxonomy> taxonomies) {
  return concat(TaxonomyKind::NaiveConcat, universe, taxonomies, false);
}

TrainingTaxonomy build_partial_merge(const ConceptUniverse& universe,
                                     std::span<const FlatTaxonomy> taxonomies) {
  return concat(TaxonomyKind::PartialMerge, universe, taxonomies, true);
}

TrainingTaxonomy build_universal_training(const UniversalTaxonomy& universal,
                                          std::span<const FlatTaxonomy> taxonomies) {
  TrainingTaxonomy out;
  out.kind = TaxonomyKind::Universal;
  out.universe = universal.universe;
  for (const auto& u : universal.classes) out.classes.push_back({u.name, u.extent});
  out.datasets.assign(taxonomies.begin(), taxonomies.end());
  for (const auto& t : taxonomies) {
    const auto& m = universal.mapping(t.name);
    std::vector<std::vector<std::size_t>> rows;
    for (const auto& c : t.classes) rows.push_back(m.at(c.name));
    out.train_mapping.push_back(std::move(rows));
  }
  return out;
}

TrainingTaxonomy build_training_taxonomy(TaxonomyKind kind, const ConceptUniverse& universe,
                                         std::span<const FlatTaxonomy> taxonomies) {
  switch (kind) {
    case TaxonomyKind::NaiveConcat: return build_naive_concat(universe, taxonomies);
    case TaxonomyKind::PartialMerge: return build_partial_merge(universe, taxonomies);
    case TaxonomyKind::Universal:
      return build_universal_training(build_universal(universe, taxonomies), taxonomies);
  }
  throw ValidationError("unknown taxonomy kind");
}

MappingMatrix::MappingMatrix(std::vector<std::string> row_names, std::vector<std::string> col_names,
                             bool has_void)
    : row_names_(std::move(row_names)),
      col_names_(std::move(col_names)),
      cells_(row_names_.size() * col_names_.size(), 0),
      has_void_(has_void) {}

std::size_t MappingMatrix::row_sum(std::size_t r) const {
  std::size_t s = 0;
  for (std::size_t c = 0; c < cols(); ++c) s += at(r, c) ? 1 : 0;
  return s;
}

std::size_t MappingMatrix::column_sum(std::size_t c) const {
  std::size_t s = 0;
  for (std::size_t r = 0; r < rows(); ++r) s += at(r, c) ? 1 : 0;
  return s;
}

Json MappingMatrix::to_json() const {
  Json data = Json::array();
  for (std::size_t r = 0; r < rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < cols(); ++c) row.push_back(at(r, c) ? 1 : 0);
    data.push_back(std::move(row));
  }
  return Json{{"rows", row_names_}, {"cols", col_names_}, {"void", has_void_}, {"data", std::move(data)}};
}

std::string MappingMatrix::to_csv() const {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (c) out << ',';
      out << (at(r, c) ? '1' : '0');
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> class_names(const TrainingTaxonomy& t) {
  std::vector<std::string> names;
  for (const auto& c : t.classes) names.push_back(c.name);
  return names;
}

}  // namespace

MappingMatrix training_matrix(const TrainingTaxonomy& taxonomy, std::string_view dataset) {
  const std::size_t d = taxonomy.dataset_index(dataset);
  const auto& flat = taxonomy.datasets[d];
  std::vector<std::string> rows;
  for (const auto& c : flat.classes) rows.push_back(c.name);
  MappingMatrix m(std::move(rows), class_names(taxonomy), false);
  for (std::size_t r = 0; r < flat.classes.size(); ++r) {
    for (auto t : taxonomy.train_mapping[d][r]) m.set(r, t);
  }
  return m;
}

MappingMatrix eval_mapping(const TrainingTaxonomy& taxonomy, const FlatTaxonomy& eval) {
  std::vector<std::string> rows;
  for (const auto& c : eval.classes) rows.push_back(c.name);
  rows.push_back("void");
  MappingMatrix m(std::move(rows), class_names(taxonomy), true);
  for (std::size_t t = 0; t < taxonomy.classes.size(); ++t) {
    bool mapped = false;
    for (std::size_t r = 0; r < eval.classes.size(); ++r) {
      if (eval.classes[r].extent.intersects(taxonomy.classes[t].extent)) {
        m.set(r, t);
        mapped = true;
      }
    }
    if (!mapped) m.set(m.void_row(), t);
  }
  return m;
}

ScoreVector dataset_scores(std::span<const double> p, const MappingMatrix& m) {
  if (p.size() != m.cols()) {
    throw ShapeError("dataset_scores: " + std::to_string(p.size()) + " probabilities for " +
                     std::to_string(m.cols()) + " training classes");
  }
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ValidationError("dataset_scores: negative or NaN probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("dataset_scores: probabilities do not sum to 1");

  ScoreVector scores(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (m.at(r, c)) scores[r] += p[c];
    }
  }
  return scores;
}

ScoreVector renormalize(std::span<const double> scores) {
  double total = 0.0;
  for (double s : scores) total += s;
  if (!(total > 0.0)) throw DegenerateInputError("renormalize: no positive score");
  ScoreVector out(scores.begin(), scores.end());
  for (double& s : out) s /= total;
  return out;
}

std::size_t predict_dataset_class(std::span<const double> p, const MappingMatrix& m) {
  const auto scores = renormalize(dataset_scores(p, m));
  std::size_t best = 0;
  for (std::size_t r = 1; r < scores.size(); ++r) {
    if (scores[r] > scores[best]) best = r;
  }
  return best;
}

}  // namespace unitax
