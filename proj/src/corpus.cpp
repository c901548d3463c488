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

#include "docinspect/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "docinspect/error.hpp"
#include "docinspect/latex.hpp"
#include "docinspect/table.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::RuleBased:
      return "rule_based";
    case Provenance::LlmGuided:
      return "llm_guided";
    case Provenance::RealWorld:
      return "real_world";
    case Provenance::Manual:
      return "manual";
  }
  return "unknown";
}

Provenance parse_provenance(std::string_view name) {
  std::string n = unicode::ascii_lower(name);
  if (n == "rule_based") return Provenance::RuleBased;
  if (n == "llm_guided") return Provenance::LlmGuided;
  if (n == "real_world") return Provenance::RealWorld;
  if (n == "manual") return Provenance::Manual;
  throw ValidationError("unknown provenance: '" + std::string(name) + "'");
}

OutputHeader default_header(std::string config_hash, std::uint64_t seed) {
  return {"docinspect " DOCINSPECT_VERSION, std::move(config_hash), seed};
}

void write_header(std::ostream& out, const OutputHeader& header) {
  OrderedJson h;
  h["toolkit"] = header.toolkit;
  h["config_hash"] = header.config_hash;
  h["seed"] = header.seed;
  OrderedJson line;
  line["_header"] = h;
  out << line.dump() << '\n';
}

bool is_header(const Json& line) { return line.is_object() && line.contains("_header"); }

void for_each_json_line(std::istream& in, const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ValidationError("line " + std::to_string(number) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw ValidationError("line " + std::to_string(number) + ": expected a JSON object");
    if (is_header(j)) continue;
    try {
      fn(j, number);
    } catch (const ValidationError& e) {
      std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      throw ValidationError("line " + std::to_string(number) + ": " + what);
    } catch (const Json::exception& e) {
      throw ValidationError("line " + std::to_string(number) + ": " + e.what());
    }
  }
}

Json to_json(const PerturbationReceipt& r) {
  OrderedJson j;
  j["error_type"] = r.error_type;
  OrderedJson spans = OrderedJson::array();
  for (const auto& s : r.spans_touched) spans.push_back({s.start, s.end});
  j["spans_touched"] = spans;
  j["rng_seed"] = r.rng_seed;
  j["parameters"] = r.parameters;
  OrderedJson edits = OrderedJson::array();
  for (const auto& e : r.edits) {
    OrderedJson ej;
    ej["start"] = e.start;
    ej["end"] = e.end;
    ej["replacement"] = e.replacement;
    edits.push_back(ej);
  }
  j["edits"] = edits;
  return Json::parse(j.dump());
}

namespace {

const Json& required(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

std::string required_string(const Json& j, const char* key) {
  const Json& v = required(j, key);
  if (!v.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::string optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

// Ordered dump for a value whose keys we control.
OrderedJson ordered(const Json& j) { return OrderedJson::parse(j.dump()); }

}  // namespace

PerturbationReceipt receipt_from_json(const Json& j) {
  PerturbationReceipt r;
  r.error_type = required_string(j, "error_type");
  if (auto it = j.find("spans_touched"); it != j.end()) {
    for (const auto& s : *it) {
      if (!s.is_array() || s.size() != 2) throw ValidationError("span must be a [start, end] pair");
      r.spans_touched.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>()});
    }
  }
  if (auto it = j.find("rng_seed"); it != j.end()) r.rng_seed = it->get<std::uint64_t>();
  if (auto it = j.find("parameters"); it != j.end()) {
    for (const auto& [k, v] : it->items()) r.parameters[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  if (auto it = j.find("edits"); it != j.end()) {
    for (const auto& e : *it) {
      r.edits.push_back({e.at("start").get<std::size_t>(), e.at("end").get<std::size_t>(),
                         e.at("replacement").get<std::string>()});
    }
  }
  return r;
}

Json to_json(const ElementRecord& r) {
  Json j;
  j["id"] = r.id;
  j["element"] = std::string(to_string(r.element));
  j["image_ref"] = r.image_ref;
  j["ground_truth"] = r.ground_truth;
  j["language_tags"] = r.language_tags;
  j["source"] = r.source;
  if (!r.extras.empty()) j["extras"] = r.extras;
  return j;
}

ElementRecord record_from_json(const Json& j) {
  static const std::set<std::string> known = {"id", "element", "image_ref", "ground_truth",
                                              "language_tags", "source", "extras"};
  ElementRecord r;
  r.id = required_string(j, "id");
  r.element = parse_element(required_string(j, "element"));
  r.image_ref = optional_string(j, "image_ref");
  r.ground_truth = required_string(j, "ground_truth");
  if (auto it = j.find("language_tags"); it != j.end()) {
    for (const auto& t : *it) r.language_tags.insert(t.get<std::string>());
  }
  r.source = optional_string(j, "source");
  if (auto it = j.find("extras"); it != j.end() && it->is_object()) r.extras = *it;
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) r.extras[k] = v;
  }
  return r;
}

std::vector<ElementRecord> read_records(std::istream& in) {
  std::vector<ElementRecord> out;
  for_each_json_line(in, [&](const Json& j, std::size_t) { out.push_back(record_from_json(j)); });
  return out;
}

void write_records(const std::vector<ElementRecord>& records, std::ostream& out) {
  for (const auto& r : records) {
    OrderedJson j;
    j["id"] = r.id;
    j["element"] = std::string(to_string(r.element));
    j["image_ref"] = r.image_ref;
    j["ground_truth"] = r.ground_truth;
    j["language_tags"] = r.language_tags;
    j["source"] = r.source;
    if (!r.extras.empty()) j["extras"] = ordered(r.extras);
    out << j.dump() << '\n';
  }
}

namespace {

OrderedJson ordered_case(const ParsingCase& c) {
  OrderedJson j;
  j["id"] = c.id;
  j["element_record_id"] = c.element_record_id;
  j["element"] = std::string(to_string(c.element));
  j["image_ref"] = c.image_ref;
  j["ground_truth"] = c.ground_truth;
  j["prediction"] = c.prediction;
  j["gold_errors"] = c.gold_errors;
  j["provenance"] = std::string(to_string(c.provenance));
  OrderedJson trace = OrderedJson::array();
  for (const auto& r : c.synthesis_trace) {
    OrderedJson rj;
    rj["error_type"] = r.error_type;
    OrderedJson spans = OrderedJson::array();
    for (const auto& s : r.spans_touched) spans.push_back({s.start, s.end});
    rj["spans_touched"] = spans;
    rj["rng_seed"] = r.rng_seed;
    rj["parameters"] = r.parameters;
    OrderedJson edits = OrderedJson::array();
    for (const auto& e : r.edits) {
      OrderedJson ej;
      ej["start"] = e.start;
      ej["end"] = e.end;
      ej["replacement"] = e.replacement;
      edits.push_back(ej);
    }
    rj["edits"] = edits;
    trace.push_back(rj);
  }
  j["synthesis_trace"] = trace;
  j["extras"] = ordered(c.extras.is_null() ? Json::object() : c.extras);
  return j;
}

}  // namespace

Json to_json(const ParsingCase& c) { return Json::parse(ordered_case(c).dump()); }

ParsingCase case_from_json(const Json& j, const Taxonomy& taxonomy) {
  static const std::set<std::string> known = {"id",         "element_record_id", "element",
                                              "image_ref",  "ground_truth",      "prediction",
                                              "gold_errors", "provenance",       "synthesis_trace",
                                              "extras"};
  ParsingCase c;
  c.id = required_string(j, "id");
  c.element_record_id = optional_string(j, "element_record_id");
  c.element = parse_element(required_string(j, "element"));
  c.image_ref = optional_string(j, "image_ref");
  c.ground_truth = optional_string(j, "ground_truth");
  c.prediction = required_string(j, "prediction");
  if (auto it = j.find("gold_errors"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw ValidationError("field 'gold_errors' must be an array");
    for (const auto& e : *it) {
      std::string id = e.get<std::string>();
      taxonomy.at(id);
      c.gold_errors.insert(id);
    }
  }
  if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
    c.provenance = parse_provenance(it->get<std::string>());
  }
  if (auto it = j.find("synthesis_trace"); it != j.end() && !it->is_null()) {
    for (const auto& r : *it) {
      PerturbationReceipt receipt = receipt_from_json(r);
      taxonomy.at(receipt.error_type);
      c.synthesis_trace.push_back(std::move(receipt));
    }
  }
  if (auto it = j.find("extras"); it != j.end() && it->is_object()) c.extras = *it;
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) c.extras[k] = v;
  }
  return c;
}

std::vector<ParsingCase> read_cases(std::istream& in, const Taxonomy& taxonomy) {
  std::vector<ParsingCase> out;
  for_each_json_line(in, [&](const Json& j, std::size_t) { out.push_back(case_from_json(j, taxonomy)); });
  return out;
}

void write_cases(const std::vector<ParsingCase>& cases, std::ostream& out) {
  for (const auto& c : cases) out << ordered_case(c).dump() << '\n';
}

std::vector<ParsingCase> read_cases_file(const std::string& path, const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_cases(in, taxonomy);
}

std::vector<ElementRecord> read_records_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_records(in);
}

bool canonical_equal(ElementKind element, std::string_view a, std::string_view b) {
  switch (element) {
    case ElementKind::Text: {
      auto canon = [](std::string_view s) {
        std::u32string t = unicode::decode(unicode::nfc(s));
        return std::u32string(unicode::trim_trailing(t));
      };
      return canon(a) == canon(b);
    }
    case ElementKind::Table: {
      std::optional<table::TableGrid> ga, gb;
      try {
        ga = table::parse_table(a);
      } catch (const ValidationError&) {
      }
      try {
        gb = table::parse_table(b);
      } catch (const ValidationError&) {
      }
      if (ga && gb) return *ga == *gb;
      if (!ga && !gb) return unicode::trim(a) == unicode::trim(b);
      return false;
    }
    case ElementKind::Equation:
      return latex::equivalent(a, b);
  }
  return false;
}

DatasetStats compute_stats(const std::vector<ParsingCase>& cases) {
  DatasetStats s;
  s.total = cases.size();
  for (const auto& c : cases) {
    ++s.per_element[std::string(to_string(c.element))];
    const std::size_t n = c.gold_errors.size();
    ++s.per_error_count[n];
    if (n == 0) ++s.good;
    else if (n == 1) ++s.single_error;
    else ++s.multi_error;
    for (const auto& e : c.gold_errors) ++s.per_error_type[e];
  }
  if (s.total > 0) {
    const auto d = static_cast<double>(s.total);
    s.good_fraction = static_cast<double>(s.good) / d;
    s.single_error_fraction = static_cast<double>(s.single_error) / d;
    s.multi_error_fraction = static_cast<double>(s.multi_error) / d;
  }
  return s;
}

OrderedJson to_json(const DatasetStats& s) {
  OrderedJson j;
  j["total"] = s.total;
  j["per_element"] = s.per_element;
  j["good"] = s.good;
  j["single_error"] = s.single_error;
  j["multi_error"] = s.multi_error;
  j["good_fraction"] = s.good_fraction;
  j["single_error_fraction"] = s.single_error_fraction;
  j["multi_error_fraction"] = s.multi_error_fraction;
  OrderedJson counts = OrderedJson::object();
  for (const auto& [n, k] : s.per_error_count) counts[std::to_string(n)] = k;
  j["per_error_count"] = counts;
  j["per_error_type"] = s.per_error_type;
  return j;
}

namespace {

std::size_t unit_count(ElementKind element, const std::string& prediction) {
  if (element != ElementKind::Table) return unicode::length(prediction);
  try {
    return table::parse_table(prediction).cell_count();
  } catch (const ValidationError&) {
    return 0;
  }
}

}  // namespace

std::vector<std::string> validate_cases(const std::vector<ParsingCase>& cases, const Taxonomy& taxonomy,
                                        const CompatibilityPolicy& policy) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  for (const auto& c : cases) {
    auto report = [&](const std::string& msg) { problems.push_back("case '" + c.id + "': " + msg); };
    if (!seen.insert(c.id).second) report("duplicate id");
    std::vector<const ErrorType*> types;
    for (const auto& e : c.gold_errors) {
      const ErrorType* t = taxonomy.find(e);
      if (!t) {
        report("unknown error type '" + e + "'");
        continue;
      }
      if (t->element != c.element) report("error type '" + e + "' does not apply to " + std::string(to_string(c.element)));
      types.push_back(t);
    }
    if (c.gold_errors.size() > static_cast<std::size_t>(policy.max_errors_per_case)) {
      report("more than " + std::to_string(policy.max_errors_per_case) + " errors");
    }
    for (std::size_t i = 0; i < types.size(); ++i) {
      for (std::size_t k = i + 1; k < types.size(); ++k) {
        if (!compatible(*types[i], *types[k], policy)) {
          report("incompatible errors '" + types[i]->id + "' and '" + types[k]->id + "'");
        }
      }
    }
    const bool equal = canonical_equal(c.element, c.ground_truth, c.prediction);
    if (c.good() && !equal) report("good case whose prediction differs from the ground truth");
    if (!c.good() && equal) report("bad case whose prediction equals the ground truth");
    const std::size_t units = unit_count(c.element, c.prediction);
    for (const auto& r : c.synthesis_trace) {
      for (const auto& s : r.spans_touched) {
        if (s.start > s.end || s.end > units) {
          report("receipt span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                 ") outside the prediction");
        }
      }
    }
  }
  return problems;
}

std::vector<std::string> validate_record(const ElementRecord& r) {
  std::vector<std::string> problems;
  auto report = [&](const std::string& msg) { problems.push_back("record '" + r.id + "': " + msg); };
  if (r.ground_truth.empty()) report("empty ground truth");
  if (r.element == ElementKind::Table) {
    try {
      table::parse_table(r.ground_truth);
    } catch (const ValidationError& e) {
      report(std::string("ground truth is not a table: ") + e.what());
    }
  }
  if (r.element == ElementKind::Equation) {
    const auto tokens = latex::tokenize(r.ground_truth);
    if (latex::significant_token_count(tokens) == 0) report("ground truth has no LaTeX tokens");
    else if (!latex::validate_balanced(tokens)) report("ground truth LaTeX is unbalanced");
  }
  for (const auto& tag : r.language_tags) {
    if (tag != "cjk" && tag != "latin") report("unknown language tag '" + tag + "'");
  }
  return problems;
}

}  // namespace docinspect
