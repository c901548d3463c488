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

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace docinspect {

enum class ElementKind { Text, Table, Equation };

std::string_view to_string(ElementKind kind);
// Accepts "text", "table", "equation" (case-insensitive; "formula" is an alias
// for equation). Throws ValidationError otherwise.
ElementKind parse_element(std::string_view name);
inline constexpr ElementKind kAllElements[] = {ElementKind::Text, ElementKind::Table,
                                               ElementKind::Equation};

enum class SynthesisMode { RuleBased, LlmGuided, RealWorldSelection };
std::string_view to_string(SynthesisMode mode);
SynthesisMode parse_synthesis_mode(std::string_view name);

enum class Exclusivity { TypeLevelExclusive, Composable };
std::string_view to_string(Exclusivity e);

struct ErrorLevel {
  std::string id;
  ElementKind element;
  std::string name;
};

struct ErrorType {
  std::string id;
  ElementKind element;
  std::string level;
  std::string level_name;
  std::string display_name;
  std::string definition;
  SynthesisMode synthesis_mode;
  Exclusivity exclusivity;
};

// The fixed error taxonomy, loaded from the checked-in manifest
// (data/taxonomy.jsonl). Immutable after construction.
class Taxonomy {
 public:
  static const Taxonomy& builtin();
  // One JSON object per line; throws ValidationError on schema problems,
  // duplicate ids, or a level shared across element kinds.
  static Taxonomy from_manifest(std::string_view jsonl);

  // Ordered by (element, level, declaration order).
  std::span<const ErrorType> types() const { return types_; }
  std::vector<const ErrorType*> types_of(std::optional<ElementKind> element) const;
  std::vector<ErrorLevel> levels(std::optional<ElementKind> element = std::nullopt) const;

  const ErrorType* find(std::string_view id) const;
  // Throws ValidationError naming the id.
  const ErrorType& at(std::string_view id) const;
  // Case-insensitive match against ids and display names.
  const ErrorType* find_by_name(std::string_view name) const;

 private:
  std::vector<ErrorType> types_;
};

std::vector<ErrorType> all_error_types(std::optional<ElementKind> filter = std::nullopt);

struct CompatibilityPolicy {
  std::set<std::pair<std::string, std::string>> forbidden_pairs;
  int max_errors_per_case = 4;
  int min_errors_per_multicase = 2;

  // Type-level errors are exclusive through their manifest class; the only
  // explicit pair separates the two newline-editing format errors.
  static CompatibilityPolicy defaults();
  // Inserts both orientations.
  void forbid(const std::string& a, const std::string& b);
  bool is_forbidden(std::string_view a, std::string_view b) const;
};

// Throws ValidationError("self-pairing") when a and b are the same type.
bool compatible(const ErrorType& a, const ErrorType& b,
                const CompatibilityPolicy& policy = CompatibilityPolicy::defaults());

}  // namespace docinspect
