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

#include <gtest/gtest.h>

#include <sstream>

#include "docinspect/cocl.hpp"
#include "docinspect/error.hpp"

namespace docinspect::cocl {
namespace {

TEST(Checklist, TableTemplateCoversEveryTableType) {
  const auto tpl = checklist_template(ElementKind::Table);
  EXPECT_EQ(tpl.items.size(), 3u);
  std::set<std::string> covered;
  for (const auto& item : tpl.items) covered.insert(item.candidate_error_types.begin(), item.candidate_error_types.end());
  std::set<std::string> table_types;
  for (const auto* t : Taxonomy::builtin().types_of(ElementKind::Table)) table_types.insert(t->id);
  EXPECT_EQ(covered, table_types);
  const std::string rendered = render_checklist(ElementKind::Table, "<table></table>");
  for (const auto* t : Taxonomy::builtin().types_of(ElementKind::Table)) {
    EXPECT_NE(rendered.find(t->display_name), std::string::npos) << t->id;
  }
}

TEST(Checklist, EveryElementCoversItsLevels) {
  for (auto e : {ElementKind::Text, ElementKind::Table, ElementKind::Equation}) {
    const auto tpl = checklist_template(e);
    EXPECT_EQ(tpl.items.size(), Taxonomy::builtin().levels(e).size());
    std::size_t types = 0;
    for (const auto& item : tpl.items) types += item.candidate_error_types.size();
    EXPECT_EQ(types, Taxonomy::builtin().types_of(e).size());
  }
}

TEST(Checklist, Rendering) {
  const std::string a = render_checklist(ElementKind::Text, "Some OCR text");
  EXPECT_EQ(a, render_checklist(ElementKind::Text, "Some OCR text"));
  EXPECT_EQ(a.rfind("Analyze the quality of OCR results for the given image.", 0), 0u);
  EXPECT_NE(a.find("<ocr_content>\nSome OCR text"), std::string::npos);
  EXPECT_NE(a.find("</ocr_content>"), std::string::npos);
}

TEST(Checklist, ParseRejectsBadTemplates) {
  const auto& tax = Taxonomy::builtin();
  EXPECT_THROW(parse_checklist(ElementKind::Table, "@@ table_integrity\nq\n", tax), ValidationError);
  EXPECT_THROW(parse_checklist(ElementKind::Table, "@@ no_such_level\nq\n", tax), ValidationError);
}

TEST(JudgePrompt, Presets) {
  const std::string cocl = render_judge_prompt(ElementKind::Equation, "x^2", PromptPreset::Cocl);
  const std::string cot = render_judge_prompt(ElementKind::Equation, "x^2", PromptPreset::Cot);
  const std::string nocot = render_judge_prompt(ElementKind::Equation, "x^2", PromptPreset::NoCot);
  EXPECT_NE(cocl, cot);
  EXPECT_NE(cot.find("<think>"), std::string::npos);
  EXPECT_EQ(nocot.find("<think>"), std::string::npos);
  EXPECT_NE(nocot.find("Do NOT give any other explanations"), std::string::npos);
  for (const auto& t : Taxonomy::builtin().types()) EXPECT_NE(cot.find(t.display_name), std::string::npos);
  EXPECT_EQ(parse_prompt_preset("nocot"), PromptPreset::NoCot);
  EXPECT_THROW(parse_prompt_preset("fancy"), ValidationError);
}

TEST(Parse, DocumentedExamples) {
  const auto good = parse_judge_output("<answer>Goodcase.</answer>");
  EXPECT_EQ(good.verdict, Verdict::Good);
  EXPECT_TRUE(good.detected.empty());
  EXPECT_TRUE(good.format_ok);
  const auto bad = parse_judge_output("<answer>Badcase.</answer><error_type>Text repetition</error_type>");
  EXPECT_EQ(bad.verdict, Verdict::Bad);
  EXPECT_EQ(bad.detected, (std::set<std::string>{"text_repetition"}));
  EXPECT_TRUE(bad.format_ok);
  const auto garbled = parse_judge_output("garbled");
  EXPECT_EQ(garbled.verdict, Verdict::Bad);
  EXPECT_TRUE(garbled.detected.empty());
  EXPECT_FALSE(garbled.format_ok);
}

TEST(Parse, ChecklistFindings) {
  const auto o = parse_judge_output(
      "<think>\n1. Integrity Level: no error\n2. Structure Level: Table merged cell error\n</think>\n"
      "<answer>Badcase.</answer><error_type>Table merged cell error</error_type>");
  ASSERT_TRUE(o.checklist_findings);
  // Level names are shared between elements, so one line may fill several level ids.
  EXPECT_EQ(o.checklist_findings->at("table_integrity"), "no error");
  EXPECT_EQ(o.checklist_findings->at("table_structure"), "Table merged cell error");
  EXPECT_EQ(o.think_text->substr(0, 2), "1.");
}

TEST(Render, RoundTripsVerdicts) {
  const auto& types = Taxonomy::builtin().types();
  for (std::size_t i = 0; i < types.size(); ++i) {
    std::set<std::string> detected = {types[i].id, types[(i + 5) % types.size()].id};
    for (const auto& think : {std::optional<std::string>{}, std::optional<std::string>{"reason"}}) {
      const auto o = parse_judge_output(render_output(Verdict::Bad, detected, think));
      EXPECT_TRUE(o.format_ok);
      EXPECT_EQ(o.detected, detected);
      EXPECT_EQ(o.think_text, think);
    }
  }
  const auto g = parse_judge_output(render_output(Verdict::Good, {}));
  EXPECT_EQ(g.verdict, Verdict::Good);
  EXPECT_TRUE(g.format_ok);
}

TEST(Records, JsonRoundTrip) {
  JudgeRecord r{"case-1", 2, parse_judge_output("<answer>Badcase.</answer><error_type>Blurry</error_type>")};
  const Json j = Json::parse(to_json(r).dump());
  EXPECT_EQ(j.at("verdict"), "bad");
  EXPECT_EQ(j.at("unknown_types"), Json::array({"Blurry"}));
  const auto back = judge_record_from_json(j);
  EXPECT_EQ(back.case_id, "case-1");
  EXPECT_EQ(back.sample_index, 2);
  EXPECT_EQ(back.output.unknown_types, r.output.unknown_types);
  // A raw-only line is parsed on read.
  std::istringstream in(R"({"case_id":"c","sample_index":0,"raw":"<answer>Goodcase.</answer>"})");
  const auto rs = read_judge_records(in);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].output.verdict, Verdict::Good);
}

}  // namespace
}  // namespace docinspect::cocl
