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

#include "unitax/metrics.hpp"

#include "unitax/error.hpp"

namespace unitax {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : n_(num_classes), cells_(num_classes * (num_classes + 1), 0) {}

void ConfusionMatrix::update(std::size_t truth, std::size_t predicted) {
  if (truth >= n_ || predicted > n_) throw ShapeError("confusion matrix: index out of range");
  ++cells_[truth * (n_ + 1) + predicted];
  ++total_;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.n_ != n_) throw ShapeError("confusion matrix: merging different shapes");
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += other.cells_[i];
  total_ += other.total_;
}

std::uint64_t ConfusionMatrix::count(std::size_t truth, std::size_t predicted) const {
  if (truth >= n_ || predicted > n_) throw ShapeError("confusion matrix: index out of range");
  return cells_[truth * (n_ + 1) + predicted];
}

std::uint64_t ConfusionMatrix::true_positives(std::size_t c) const { return count(c, c); }

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
  std::uint64_t fp = 0;
  for (std::size_t r = 0; r < n_; ++r) {
    if (r != c) fp += count(r, c);
  }
  return fp;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
  std::uint64_t fn = 0;
  for (std::size_t p = 0; p <= n_; ++p) {
    if (p != c) fn += count(c, p);
  }
  return fn;
}

std::optional<double> ConfusionMatrix::iou(std::size_t c) const {
  const auto tp = true_positives(c);
  const auto denom = tp + false_positives(c) + false_negatives(c);
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

double ConfusionMatrix::miou() const {
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t c = 0; c < n_; ++c) {
    if (auto v = iou(c)) {
      sum += *v;
      ++defined;
    }
  }
  if (defined == 0) throw DegenerateInputError("miou: no class is present or predicted");
  return sum / static_cast<double>(defined);
}

Json MetricsReport::to_json() const {
  Json per_class = Json::object();
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    per_class[class_names[c]] = iou[c] ? Json(*iou[c]) : Json(nullptr);
  }
  Json support_json = Json::object();
  for (std::size_t c = 0; c < class_names.size(); ++c) support_json[class_names[c]] = support[c];
  return Json{{"iou", std::move(per_class)},
              {"miou", miou},
              {"samples", samples},
              {"support", std::move(support_json)},
              {"undefined", undefined}};
}

MetricsReport make_report(const ConfusionMatrix& cm, std::vector<std::string> class_names) {
  if (class_names.size() != cm.num_classes()) throw ShapeError("report: class names do not match matrix");
  MetricsReport report;
  report.samples = cm.total();
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    report.iou.push_back(cm.iou(c));
    if (!report.iou.back()) report.undefined.push_back(class_names[c]);
    std::uint64_t support = 0;
    for (std::size_t p = 0; p <= cm.num_classes(); ++p) support += cm.count(c, p);
    report.support.push_back(support);
  }
  report.class_names = std::move(class_names);
  report.miou = cm.miou();
  return report;
}

MetricsReport cross_eval(std::span<const std::vector<double>> probabilities,
                         std::span<const std::size_t> truth, const MappingMatrix& eval_matrix) {
  if (probabilities.size() != truth.size()) throw ShapeError("cross_eval: predictions and labels differ in count");
  if (!eval_matrix.has_void()) throw ShapeError("cross_eval: evaluation matrix needs a void row");
  const std::size_t n = eval_matrix.rows() - 1;
  ConfusionMatrix cm(n);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t row = predict_dataset_class(probabilities[i], eval_matrix);
    cm.update(truth[i], row == eval_matrix.void_row() ? cm.void_index() : row);
  }
  std::vector<std::string> names(eval_matrix.row_names().begin(), eval_matrix.row_names().end() - 1);
  return make_report(cm, std::move(names));
}

}  // namespace unitax
