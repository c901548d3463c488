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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/corpus.hpp"
#include "docinspect/taxonomy.hpp"

namespace docinspect::cocl {

struct ChecklistItem {
  std::string check_id;  // error level id
  std::string level_name;
  std::string prompt_text;
  std::vector<std::string> candidate_error_types;
};

struct ChecklistTemplate {
  ElementKind element;
  std::vector<ChecklistItem> items;
};

// One item per error level of the element, worded by data/checklists/<element>.txt.
ChecklistTemplate checklist_template(ElementKind element, const Taxonomy& taxonomy = Taxonomy::builtin());
ChecklistTemplate parse_checklist(ElementKind element, std::string_view text, const Taxonomy& taxonomy);

std::string render_checklist(ElementKind element, std::string_view parsed_output,
                             const Taxonomy& taxonomy = Taxonomy::builtin());

enum class PromptPreset { Cocl, Cot, NoCot };
std::string_view to_string(PromptPreset preset);
PromptPreset parse_prompt_preset(std::string_view name);

// Judge prompt: the checklist template for Cocl, otherwise the tag-format
// prompt with every error type defined.
std::string render_judge_prompt(ElementKind element, std::string_view parsed_output, PromptPreset preset,
                                const Taxonomy& taxonomy = Taxonomy::builtin());

enum class Verdict { Good, Bad };
std::string_view to_string(Verdict v);

struct JudgeOutput {
  std::string raw;
  std::optional<std::string> think_text;
  Verdict verdict = Verdict::Bad;
  std::set<std::string> detected;           // error type ids
  std::vector<std::string> unknown_types;   // tag contents that matched no type
  bool format_ok = false;
  std::optional<std::map<std::string, std::string>> checklist_findings;  // level id -> finding
};

// Total: never throws. Unparseable input gives verdict Bad, nothing detected
// and format_ok false. An answer of Good that still lists error types is
// reported as Bad with the types kept and format_ok false.
JudgeOutput parse_judge_output(std::string_view raw, const Taxonomy& taxonomy = Taxonomy::builtin());

// Canonical tag-format rendering of a verdict, using display names.
std::string render_output(Verdict verdict, const std::set<std::string>& detected,
                          const std::optional<std::string>& think = std::nullopt,
                          const Taxonomy& taxonomy = Taxonomy::builtin());

// Judge-output JSONL: {case_id, sample_index, raw} plus, once parsed,
// verdict, detected, format_ok and unknown_types.
struct JudgeRecord {
  std::string case_id;
  int sample_index = 0;
  JudgeOutput output;
};

OrderedJson to_json(const JudgeRecord& record);
// Lines without a verdict field are parsed from `raw`.
JudgeRecord judge_record_from_json(const Json& j, const Taxonomy& taxonomy = Taxonomy::builtin());
std::vector<JudgeRecord> read_judge_records(std::istream& in, const Taxonomy& taxonomy = Taxonomy::builtin());
std::vector<JudgeRecord> read_judge_records_file(const std::string& path,
                                                 const Taxonomy& taxonomy = Taxonomy::builtin());

}  // namespace docinspect::cocl
