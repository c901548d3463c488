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

#include <deque>
#include <filesystem>

#include "docinspect/composer.hpp"
#include "docinspect/error.hpp"
#include "docinspect/synth_llm.hpp"
#include "docinspect/table.hpp"
#include "docinspect/unicode.hpp"
#include "e2e.hpp"
#include "golden_inputs.hpp"
#include "sim_llm.hpp"

namespace docinspect::synth {
namespace {

const std::filesystem::path kTests = DOCINSPECT_TEST_DATA;

// Answers from a fixed queue and remembers the requests.
class ScriptedClient : public client::ModelClient {
 public:
  explicit ScriptedClient(std::deque<std::string> answers) : answers_(std::move(answers)) {}
  client::ChatResponse complete(const client::ChatRequest& request) override {
    requests.push_back(request);
    if (answers_.empty()) throw ClientError(ClientErrorKind::Malformed, "script exhausted");
    client::ChatResponse r;
    r.text = answers_.front();
    answers_.pop_front();
    return r;
  }
  const client::ClientProfile& profile() const override { return profile_; }
  std::vector<client::ChatRequest> requests;

 private:
  std::deque<std::string> answers_;
  client::ClientProfile profile_ = fixtures::replay_profile();
};

const std::string kTable = "<table><tr><td>a</td><td>b</td></tr><tr><td>c</td><td>d</td></tr></table>";

TEST(Prompt, MergedCellGolden) {
  std::string table_gt;
  for (const auto& g : fixtures::golden_inputs()) {
    if (g.element == ElementKind::Table) table_gt = g.input;
  }
  EXPECT_EQ(render_prompt("table_merged_cell_error", table_gt),
            fixtures::read_file((kTests / "golden/prompts/table_merged_cell_error.txt").string()));
  EXPECT_NE(render_prompt("table_merged_cell_error", kTable).find(kTable), std::string::npos);
}

TEST(Prompt, Errors) {
  EXPECT_THROW(render_prompt("text_repetition", "x"), ValidationError);
  EXPECT_THROW(render_prompt("table_merged_cell_error", ""), ValidationError);
  EXPECT_THROW(render_prompt("table_recognition_corruption", kTable), ValidationError);
  EXPECT_THROW(render_prompt("no_such_type", "x"), ValidationError);
}

TEST(Prompt, InputIsNotReinterpreted) {
  // Braces in the input must survive verbatim.
  const std::string in = "\\frac{a}{b} + {input}";
  EXPECT_NE(render_prompt("displayed_formula_character_error", in).find(in), std::string::npos);
}

TEST(Response, FinalBlock) {
  const auto r = parse_response("text_character_recognition_error",
                                "Modification Details:\n1. changed\nFinal Text: ab", std::string_view("aa"));
  EXPECT_EQ(r.final_payload, "ab");
  ASSERT_TRUE(r.modification_details);
  EXPECT_NE(r.modification_details->find("changed"), std::string::npos);
  const auto last = parse_response("text_character_recognition_error", "final text: x\nFinal Text: y");
  EXPECT_EQ(last.final_payload, "y");
  const auto fenced = parse_response("displayed_formula_character_error", "Final formula:\n```latex\nx+l\n```");
  EXPECT_EQ(fenced.final_payload, "x+l");
}

TEST(Response, UnsoundAndUnparseable) {
  EXPECT_THROW(parse_response("text_character_recognition_error", "no marker"), UnparseableResponse);
  EXPECT_THROW(parse_response("text_character_recognition_error", "Final Text: same", std::string_view("same")),
               UnsoundResponse);
  EXPECT_THROW(parse_response("table_merged_cell_error", "Final Table: <div>nope</div>"), UnsoundResponse);
  EXPECT_THROW(parse_response("displayed_formula_syntax_error", "Final formula: \\frac{a}{b}"), UnsoundResponse);
  EXPECT_NO_THROW(parse_response("displayed_formula_syntax_error", "Final formula: \\frac{a}{b"));
  EXPECT_THROW(parse_response("displayed_formula_character_error", "Final formula: \\frac{a}{b"), UnsoundResponse);
}

TEST(Filter, Verdicts) {
  EXPECT_EQ(parse_filter_verdict("reasoning\n[Result] Bad Table"), FilterVerdict::BadTable);
  EXPECT_EQ(parse_filter_verdict("[Result] Good Table\n[result] unable to judge"), FilterVerdict::UnableToJudge);
  EXPECT_THROW(parse_filter_verdict("Bad Table"), UnparseableResponse);
}

TEST(Filter, SelectsBadTablesOnly) {
  ElementRecord r;
  r.id = "t";
  r.element = ElementKind::Table;
  r.ground_truth = kTable;
  ScriptedClient client({"[Result] Bad Table", "[Result] Unable to judge", "garbage"});
  const auto out = filter_corruption(r, {kTable, "<table><tr><td>a</td></tr></table>",
                                         "<table><tr><td>x</td><td>b</td></tr></table>",
                                         "<table><tr><td>y</td></tr></table>"},
                                     client);
  ASSERT_EQ(out.size(), 4u);
  EXPECT_FALSE(out[0].selected);
  EXPECT_EQ(client.requests.size(), 3u);
  EXPECT_TRUE(out[1].selected);
  EXPECT_FALSE(out[2].selected);
  EXPECT_FALSE(out[3].selected);
  EXPECT_NE(out[3].reason.find("skipped"), std::string::npos);
}

TEST(Filter, TranscriptReplaySelectsTwoOfFive) {
  const auto dir = kTests / "fixtures/corruption";
  const auto records = read_records_file((dir / "records.jsonl").string());
  std::vector<std::string> candidates;
  std::istringstream in(fixtures::read_file((dir / "candidates.jsonl").string()));
  for (std::string line; std::getline(in, line);) candidates.push_back(Json::parse(line).at("prediction"));
  client::ReplayClient replay(fixtures::replay_profile(), (kTests / "fixtures/replay").string());
  const auto out = filter_corruption(records.at(0), candidates, replay);
  std::size_t selected = 0;
  for (const auto& o : out) selected += o.selected;
  EXPECT_EQ(out.size(), 5u);
  EXPECT_EQ(selected, 2u);
  EXPECT_EQ(read_cases_file((dir / "selected.jsonl").string()).size(), 2u);
}

TEST(Injector, RetriesUnsoundThenSucceeds) {
  ScriptedClient client({"Final Text: Hello", "no marker at all", "Modification Details:\n1. e->c\nFinal Text: Hcllo"});
  LlmInjector inj(client, 3);
  const auto p = inj.apply("text_character_recognition_error", "Hello", 42);
  EXPECT_EQ(p.output, "Hcllo");
  EXPECT_EQ(p.receipt.parameters.at("attempts"), "3");
  EXPECT_EQ(apply_splices("Hello", p.receipt.edits), "Hcllo");
  ASSERT_EQ(client.requests.size(), 3u);
  EXPECT_NE(client.requests[0].seed, client.requests[1].seed);
}

TEST(Injector, GivesUpAfterMaxAttempts) {
  ScriptedClient client({"Final Text: Hello", "Final Text: Hello"});
  LlmInjector inj(client, 2);
  EXPECT_THROW(inj.apply("text_character_recognition_error", "Hello", 1), PreconditionError);
  EXPECT_THROW(inj.apply("text_repetition", "Hello", 1), ValidationError);
}

TEST(Injector, InlineStyleRewritesOneFormula) {
  fixtures::SimulatedLlm llm;
  LlmInjector inj(llm);
  const std::string in = "Energy $E = m c^{2}$ and mass.";
  const auto p = inj.apply("inline_formula_style_error", in, 3);
  EXPECT_EQ(apply_splices(in, p.receipt.edits), p.output);
  EXPECT_EQ(p.output.substr(0, 7), "Energy ");
  EXPECT_EQ(p.output.substr(p.output.size() - 10), " and mass.");
}

TEST(Injector, TableKeepsOutputHtml) {
  fixtures::SimulatedLlm llm;
  LlmInjector inj(llm);
  const auto p = inj.apply("table_merged_cell_error", kTable, 5);
  EXPECT_EQ(p.receipt.parameters.at("output_html"), p.output);
  EXPECT_TRUE(table::well_formed(table::parse_table(p.output)));
}

TEST(DiffSplice, GraphemeAligned) {
  const auto s = diff_splice(U"café ok", U"cafe ok");
  EXPECT_EQ(s.start, 3u);
  EXPECT_EQ(s.end, 5u);
  EXPECT_EQ(s.replacement, "e");
  const auto same = diff_splice(U"abc", U"abc");
  EXPECT_EQ(same.start, same.end);
  EXPECT_EQ(apply_splices("abXc", {diff_splice(U"abXc", U"abYYc")}), "abYYc");
}

}  // namespace
}  // namespace docinspect::synth
