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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "unitax/taxonomy.hpp"

namespace unitax {

using Json = nlohmann::ordered_json;

// Input schema:
//   {"universe": ["concept", ...],
//    "datasets": [{"name": "...", "classes": [{"name": "...", "concepts": [...]}]}],
//    "names": [{"concepts": [...], "name": "..."}]}      <- optional
// Loading does not check flatness; call validate_flat() on each dataset.

/// Throws LoadError; parse errors carry the line number, unknown concepts the
/// dataset and class they were found in.
TaxonomySet parse_taxonomy(std::string_view text, std::string_view source = "<input>");
TaxonomySet taxonomy_from_json(const Json& doc, std::string_view source = "<input>");
TaxonomySet load_taxonomy(const std::filesystem::path& path);

/// The universal taxonomy in the input schema (a single dataset named
/// "universal") plus a "mappings" object: dataset -> class -> [universal names].
Json universal_to_json(const UniversalTaxonomy& universal);
/// Inverse of universal_to_json; the mapping section is resolved by name.
UniversalTaxonomy universal_from_json(const Json& doc);

Json taxonomy_to_json(const TaxonomySet& set);

/// Two-space indented JSON with a trailing newline. Output is byte-stable for
/// identical input.
std::string dump_json(const Json& doc);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace unitax
