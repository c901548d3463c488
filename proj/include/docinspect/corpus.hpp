// Copyright 2026 The docinspect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "docinspect/receipt.hpp"
#include "docinspect/taxonomy.hpp"

namespace docinspect {

using Json = nlohmann::json;
// Insertion-ordered JSON, used for everything written to disk so that field
// order is stable and readable.
using OrderedJson = nlohmann::ordered_json;

enum class Provenance { RuleBased, LlmGuided, RealWorld, Manual };
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view name);

struct ElementRecord {
  std::string id;
  ElementKind element = ElementKind::Text;
  std::string image_ref;
  std::string ground_truth;
  std::set<std::string> language_tags;  // "cjk", "latin"
  std::string source;
  Json extras = Json::object();

  bool operator==(const ElementRecord&) const = default;
};

struct ParsingCase {
  std::string id;
  std::string element_record_id;
  ElementKind element = ElementKind::Text;
  std::string image_ref;
  std::string ground_truth;
  std::string prediction;
  std::set<std::string> gold_errors;  // empty for a good case
  Provenance provenance = Provenance::RuleBased;
  std::vector<PerturbationReceipt> synthesis_trace;
  Json extras = Json::object();

  bool good() const { return gold_errors.empty(); }
  bool operator==(const ParsingCase&) const = default;
};

// First line of every JSONL file the toolkit writes.
struct OutputHeader {
  std::string toolkit;
  std::string config_hash;
  std::uint64_t seed = 0;
};
OutputHeader default_header(std::string config_hash = "", std::uint64_t seed = 0);
void write_header(std::ostream& out, const OutputHeader& header);
// True for the {"_header": ...} line.
bool is_header(const Json& line);

// Line-oriented JSONL helpers. The callback gets the parsed object and its
// 1-based line number; blank and header lines are skipped. Parse failures
// raise ValidationError("line N: ...").
void for_each_json_line(std::istream& in, const std::function<void(const Json&, std::size_t)>& fn);

Json to_json(const PerturbationReceipt& r);
PerturbationReceipt receipt_from_json(const Json& j);

Json to_json(const ElementRecord& r);
ElementRecord record_from_json(const Json& j);
std::vector<ElementRecord> read_records(std::istream& in);
void write_records(const std::vector<ElementRecord>& records, std::ostream& out);

Json to_json(const ParsingCase& c);
ParsingCase case_from_json(const Json& j, const Taxonomy& taxonomy = Taxonomy::builtin());
std::vector<ParsingCase> read_cases(std::istream& in, const Taxonomy& taxonomy = Taxonomy::builtin());
void write_cases(const std::vector<ParsingCase>& cases, std::ostream& out);

std::vector<ParsingCase> read_cases_file(const std::string& path, const Taxonomy& taxonomy = Taxonomy::builtin());
std::vector<ElementRecord> read_records_file(const std::string& path);

// Canonical form used to decide whether a prediction equals its ground truth:
// text is NFC with trailing whitespace trimmed, tables compare as parsed grids,
// equations compare as LaTeX token sequences without whitespace.
bool canonical_equal(ElementKind element, std::string_view a, std::string_view b);

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> per_element;
  std::size_t good = 0;
  std::size_t single_error = 0;
  std::size_t multi_error = 0;
  double good_fraction = 0;
  double single_error_fraction = 0;
  double multi_error_fraction = 0;
  std::map<std::string, std::size_t> per_error_type;
  std::map<std::size_t, std::size_t> per_error_count;
};

DatasetStats compute_stats(const std::vector<ParsingCase>& cases);
OrderedJson to_json(const DatasetStats& stats);

// Problems found in a case file; an empty list means the file is valid.
std::vector<std::string> validate_cases(const std::vector<ParsingCase>& cases,
                                        const Taxonomy& taxonomy = Taxonomy::builtin(),
                                        const CompatibilityPolicy& policy = CompatibilityPolicy::defaults());
std::vector<std::string> validate_record(const ElementRecord& record);

}  // namespace docinspect
