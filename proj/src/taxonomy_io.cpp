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

#include "unitax/taxonomy_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "unitax/error.hpp"

namespace unitax {

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

const Json& member(const Json& obj, const char* key, std::string_view context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw LoadError(std::string(context) + ": missing \"" + key + "\"");
  }
  return obj.at(key);
}

std::vector<std::string> string_list(const Json& arr, std::string_view context) {
  if (!arr.is_array()) throw LoadError(std::string(context) + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw LoadError(std::string(context) + ": expected an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

ConceptSet concepts_in(const ConceptUniverse& universe, const Json& arr, const std::string& context) {
  auto ids = string_list(arr, context);
  ConceptSet set(universe.size());
  for (const auto& id : ids) {
    auto index = universe.index_of(id);
    if (!index) throw LoadError(context + ": unknown concept '" + id + "'");
    set.insert(*index);
  }
  return set;
}

}  // namespace

TaxonomySet taxonomy_from_json(const Json& doc, std::string_view source) {
  const std::string where(source);
  TaxonomySet set;
  set.universe = ConceptUniverse(string_list(member(doc, "universe", where), where + ": universe"));

  const auto& datasets = member(doc, "datasets", where);
  if (!datasets.is_array()) throw LoadError(where + ": \"datasets\" must be an array");
  for (const auto& d : datasets) {
    FlatTaxonomy t;
    const auto& name = member(d, "name", where + ": dataset");
    if (!name.is_string()) throw LoadError(where + ": dataset name must be a string");
    t.name = name.get<std::string>();
    const std::string dctx = where + ": dataset '" + t.name + "'";
    const auto& classes = member(d, "classes", dctx);
    if (!classes.is_array()) throw LoadError(dctx + ": \"classes\" must be an array");
    for (const auto& c : classes) {
      const auto& cname = member(c, "name", dctx + " class");
      if (!cname.is_string()) throw LoadError(dctx + ": class name must be a string");
      DatasetClass dc{t.name, cname.get<std::string>(), {}};
      const std::string cctx = dctx + " class '" + dc.name + "'";
      dc.extent = concepts_in(set.universe, member(c, "concepts", cctx), cctx);
      t.classes.push_back(std::move(dc));
    }
    set.datasets.push_back(std::move(t));
  }

  if (doc.contains("names")) {
    for (const auto& n : doc.at("names")) {
      const auto& nm = member(n, "name", where + ": names entry");
      if (!nm.is_string()) throw LoadError(where + ": names entry needs a string name");
      const std::string nctx = where + ": names entry '" + nm.get<std::string>() + "'";
      set.names.push_back({concepts_in(set.universe, member(n, "concepts", nctx), nctx),
                           nm.get<std::string>()});
    }
  }
  return set;
}

TaxonomySet parse_taxonomy(std::string_view text, std::string_view source) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(std::string(source) + ":" + std::to_string(line_of(text, e.byte)) +
                    ": JSON parse error: " + e.what());
  }
  return taxonomy_from_json(doc, source);
}

TaxonomySet load_taxonomy(const std::filesystem::path& path) {
  return parse_taxonomy(read_text(path), path.string());
}

Json universal_to_json(const UniversalTaxonomy& universal) {
  Json doc = Json::object();
  doc["universe"] = universal.universe.ids();
  Json classes = Json::array();
  for (const auto& u : universal.classes) {
    classes.push_back({{"name", u.name}, {"concepts", concept_ids(universal.universe, u.extent)}});
  }
  doc["datasets"] = Json::array({{{"name", "universal"}, {"classes", std::move(classes)}}});
  Json mappings = Json::object();
  for (const auto& m : universal.mappings) {
    Json per_class = Json::object();
    for (std::size_t c = 0; c < m.class_names.size(); ++c) {
      Json targets = Json::array();
      for (auto t : m.targets[c]) targets.push_back(universal.classes[t].name);
      per_class[m.class_names[c]] = std::move(targets);
    }
    mappings[m.dataset] = std::move(per_class);
  }
  doc["mappings"] = std::move(mappings);
  return doc;
}

UniversalTaxonomy universal_from_json(const Json& doc) {
  auto set = taxonomy_from_json(doc, "universal");
  if (set.datasets.size() != 1) throw LoadError("universal: expected exactly one dataset");
  UniversalTaxonomy out;
  out.universe = set.universe;
  for (auto& c : set.datasets.front().classes) out.classes.push_back({c.name, c.extent});
  const auto& mappings = member(doc, "mappings", "universal");
  for (const auto& [dataset, per_class] : mappings.items()) {
    DatasetMapping m{dataset, {}, {}};
    for (const auto& [cls, targets] : per_class.items()) {
      std::vector<std::size_t> idx;
      for (const auto& name : string_list(targets, "universal mappings")) {
        auto i = out.find(name);
        if (!i) throw LoadError("universal mappings: unknown universal class '" + name + "'");
        idx.push_back(*i);
      }
      m.class_names.push_back(cls);
      m.targets.push_back(std::move(idx));
    }
    out.mappings.push_back(std::move(m));
  }
  return out;
}

Json taxonomy_to_json(const TaxonomySet& set) {
  Json doc = Json::object();
  doc["universe"] = set.universe.ids();
  Json datasets = Json::array();
  for (const auto& d : set.datasets) {
    Json classes = Json::array();
    for (const auto& c : d.classes) {
      classes.push_back({{"name", c.name}, {"concepts", concept_ids(set.universe, c.extent)}});
    }
    datasets.push_back({{"name", d.name}, {"classes", std::move(classes)}});
  }
  doc["datasets"] = std::move(datasets);
  if (!set.names.empty()) {
    Json names = Json::array();
    for (const auto& n : set.names) {
      names.push_back({{"concepts", concept_ids(set.universe, n.extent)}, {"name", n.name}});
    }
    doc["names"] = std::move(names);
  }
  return doc;
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw LoadError("failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace unitax
