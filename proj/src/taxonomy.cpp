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

#include "docinspect/taxonomy.hpp"

#include <algorithm>
#include <map>

#include "docinspect/error.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/unicode.hpp"
#include "json.hpp"

namespace docinspect {

std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::Text:
      return "text";
    case ElementKind::Table:
      return "table";
    case ElementKind::Equation:
      return "equation";
  }
  return "unknown";
}

ElementKind parse_element(std::string_view name) {
  const std::string lower = unicode::ascii_lower(name);
  if (lower == "text") return ElementKind::Text;
  if (lower == "table") return ElementKind::Table;
  if (lower == "equation" || lower == "formula") return ElementKind::Equation;
  throw ValidationError("unknown element kind: '" + std::string(name) + "'");
}

std::string_view to_string(SynthesisMode mode) {
  switch (mode) {
    case SynthesisMode::RuleBased:
      return "rule_based";
    case SynthesisMode::LlmGuided:
      return "llm_guided";
    case SynthesisMode::RealWorldSelection:
      return "real_world_selection";
  }
  return "unknown";
}

SynthesisMode parse_synthesis_mode(std::string_view name) {
  if (name == "rule_based") return SynthesisMode::RuleBased;
  if (name == "llm_guided") return SynthesisMode::LlmGuided;
  if (name == "real_world_selection") return SynthesisMode::RealWorldSelection;
  throw ValidationError("unknown synthesis mode: '" + std::string(name) + "'");
}

std::string_view to_string(Exclusivity e) {
  return e == Exclusivity::TypeLevelExclusive ? "type_level_exclusive" : "composable";
}

namespace {

Exclusivity parse_exclusivity(std::string_view name) {
  if (name == "type_level_exclusive") return Exclusivity::TypeLevelExclusive;
  if (name == "composable") return Exclusivity::Composable;
  throw ValidationError("unknown exclusivity class: '" + std::string(name) + "'");
}

}  // namespace

Taxonomy Taxonomy::from_manifest(std::string_view jsonl) {
  Taxonomy tax;
  std::map<std::string, ElementKind> level_owner;
  std::map<std::string, std::size_t> level_rank;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("taxonomy manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    ErrorType t;
    try {
      t.id = j.at("id").get<std::string>();
      t.element = parse_element(j.at("element").get<std::string>());
      t.level = j.at("level").get<std::string>();
      t.level_name = j.at("level_name").get<std::string>();
      t.display_name = j.at("display_name").get<std::string>();
      t.definition = j.at("definition").get<std::string>();
      t.synthesis_mode = parse_synthesis_mode(j.at("synthesis_mode").get<std::string>());
      t.exclusivity = parse_exclusivity(j.at("exclusivity_class").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("taxonomy manifest line " + std::to_string(line_no) + ": " + e.what());
    }
    if (tax.find(t.id)) throw ValidationError("taxonomy manifest: duplicate id '" + t.id + "'");
    auto [it, inserted] = level_owner.emplace(t.level, t.element);
    if (!inserted && it->second != t.element) {
      throw ValidationError("taxonomy manifest: level '" + t.level + "' spans element kinds");
    }
    level_rank.emplace(t.level, level_rank.size());
    tax.types_.push_back(std::move(t));
  }
  std::stable_sort(tax.types_.begin(), tax.types_.end(),
                   [&](const ErrorType& a, const ErrorType& b) {
                     if (a.element != b.element) return a.element < b.element;
                     return level_rank.at(a.level) < level_rank.at(b.level);
                   });
  return tax;
}

const Taxonomy& Taxonomy::builtin() {
  static const Taxonomy tax = from_manifest(resources::get("taxonomy.jsonl"));
  return tax;
}

std::vector<const ErrorType*> Taxonomy::types_of(std::optional<ElementKind> element) const {
  std::vector<const ErrorType*> out;
  for (const auto& t : types_) {
    if (!element || t.element == *element) out.push_back(&t);
  }
  return out;
}

std::vector<ErrorLevel> Taxonomy::levels(std::optional<ElementKind> element) const {
  std::vector<ErrorLevel> out;
  for (const auto& t : types_) {
    if (element && t.element != *element) continue;
    if (out.empty() || out.back().id != t.level) {
      out.push_back({t.level, t.element, t.level_name});
    }
  }
  return out;
}

const ErrorType* Taxonomy::find(std::string_view id) const {
  for (const auto& t : types_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const ErrorType& Taxonomy::at(std::string_view id) const {
  if (const ErrorType* t = find(id)) return *t;
  throw ValidationError("unknown error type id: '" + std::string(id) + "'");
}

const ErrorType* Taxonomy::find_by_name(std::string_view name) const {
  const std::string key = unicode::ascii_lower(unicode::trim(name));
  for (const auto& t : types_) {
    if (unicode::ascii_lower(t.id) == key || unicode::ascii_lower(t.display_name) == key) return &t;
  }
  return nullptr;
}

std::vector<ErrorType> all_error_types(std::optional<ElementKind> filter) {
  std::vector<ErrorType> out;
  for (const ErrorType* t : Taxonomy::builtin().types_of(filter)) out.push_back(*t);
  return out;
}

CompatibilityPolicy CompatibilityPolicy::defaults() {
  CompatibilityPolicy p;
  p.forbid("text_paragraph_format_error", "list_format_error");
  return p;
}

void CompatibilityPolicy::forbid(const std::string& a, const std::string& b) {
  forbidden_pairs.emplace(a, b);
  forbidden_pairs.emplace(b, a);
}

bool CompatibilityPolicy::is_forbidden(std::string_view a, std::string_view b) const {
  return forbidden_pairs.count({std::string(a), std::string(b)}) > 0 ||
         forbidden_pairs.count({std::string(b), std::string(a)}) > 0;
}

bool compatible(const ErrorType& a, const ErrorType& b, const CompatibilityPolicy& policy) {
  if (a.id == b.id) throw ValidationError("self-pairing: '" + a.id + "'");
  if (a.exclusivity == Exclusivity::TypeLevelExclusive ||
      b.exclusivity == Exclusivity::TypeLevelExclusive) {
    return false;
  }
  if (a.element != b.element) return false;
  return !policy.is_forbidden(a.id, b.id);
}

}  // namespace docinspect
