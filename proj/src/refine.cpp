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

#include "docinspect/refine.hpp"

#include "docinspect/error.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/taxonomy.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::client {

std::string_view to_string(RefineMode mode) {
  switch (mode) {
    case RefineMode::NoGuidance:
      return "none";
    case RefineMode::BinaryGuidance:
      return "binary";
    case RefineMode::DetailedGuidance:
      return "detailed";
  }
  return "none";
}

RefineMode parse_refine_mode(std::string_view name) {
  const std::string n = unicode::ascii_lower(name);
  if (n == "none" || n == "ng") return RefineMode::NoGuidance;
  if (n == "binary" || n == "bg") return RefineMode::BinaryGuidance;
  if (n == "detailed" || n == "dg") return RefineMode::DetailedGuidance;
  throw ValidationError("unknown refine mode '" + std::string(name) + "'");
}

namespace {

std::string replace_all(std::string s, std::string_view key, std::string_view value) {
  for (std::size_t at = s.find(key); at != std::string::npos; at = s.find(key, at + value.size())) {
    s.replace(at, key.size(), value);
  }
  return s;
}

std::string feedback_text(const cocl::JudgeOutput& judge) {
  std::string out;
  const Taxonomy& tax = Taxonomy::builtin();
  for (const auto& id : judge.detected) {
    const ErrorType& t = tax.at(id);
    out += "- " + t.display_name + " (" + t.id + "): " + t.definition + "\n";
  }
  for (const auto& name : judge.unknown_types) out += "- " + name + "\n";
  if (out.empty()) out = "- The output was judged to contain errors.\n";
  if (judge.think_text && !unicode::trim(*judge.think_text).empty()) {
    out += "Explanation:\n" + unicode::trim(*judge.think_text) + "\n";
  }
  out.pop_back();
  return out;
}

}  // namespace

std::optional<std::string> build_refiner_prompt(RefineMode mode, const ParsingCase& c,
                                                const std::optional<cocl::JudgeOutput>& judge) {
  if (mode != RefineMode::NoGuidance) {
    if (!judge) throw ValidationError("refine mode '" + std::string(to_string(mode)) + "' needs a judge output");
    if (judge->verdict == cocl::Verdict::Good) return std::nullopt;
  }
  const bool detailed = mode == RefineMode::DetailedGuidance;
  const auto s = resources::sections(resources::get("prompts/refine.txt"));
  std::string out = replace_all(s.at("role"), "{feedback_clause}", detailed ? s.at("feedback_clause") : "");
  out += "\n" + replace_all(s.at("inputs"), "{category}", to_string(c.element));
  if (detailed) out += "\n" + s.at("feedback_input") + "\n" + s.at("principles");
  out += "\n" + s.at("process");
  out += "\n" + (detailed ? s.at("guided_steps") : s.at("unguided_step"));
  out += "\n" + s.at("output") + "\n\n";
  if (detailed) out += replace_all(s.at("feedback_block"), "{feedback}", feedback_text(*judge)) + "\n\n";
  out += replace_all(s.at("ocr_block"), "{prediction}", c.prediction) + "\n";
  return out;
}

}  // namespace docinspect::client
