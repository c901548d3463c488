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

#include <filesystem>

#include "docinspect/error.hpp"
#include "docinspect/metrics.hpp"
#include "e2e.hpp"

namespace docinspect::metrics {
namespace {

cocl::JudgeOutput out(std::set<std::string> detected, bool good = false) {
  cocl::JudgeOutput o;
  o.format_ok = true;
  o.verdict = good ? cocl::Verdict::Good : cocl::Verdict::Bad;
  o.detected = std::move(detected);
  return o;
}

CaseJudgment judged(std::set<std::string> gold, std::vector<cocl::JudgeOutput> preds) {
  static int n = 0;
  return {"c" + std::to_string(n++), ElementKind::Text, std::move(gold), std::move(preds)};
}

TEST(CaseF1, AllCorrect) {
  const std::vector<CaseJudgment> js = {judged({}, {out({}, true)}), judged({}, {out({}, true)}),
                                        judged({"A"}, {out({"A"})}), judged({"B"}, {out({"B"})})};
  EXPECT_EQ(case_f1(js), 1.0);
}

TEST(CaseF1, HandCounted) {
  const std::vector<CaseJudgment> js = {judged({"A"}, {out({"A"})}), judged({"A"}, {out({}, true)}),
                                        judged({}, {out({}, true)})};
  const auto s = case_scores(js);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.recall, 0.5);
  EXPECT_DOUBLE_EQ(s.f1, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.accuracy, 2.0 / 3.0);
}

TEST(CaseF1, Degenerate) {
  const auto s = case_scores({judged({}, {out({}, true)})});
  EXPECT_EQ(s.f1, 0.0);
  EXPECT_TRUE(s.degenerate);
  EXPECT_THROW(case_f1({}), ValidationError);
}

TEST(TypePrf, Examples) {
  const auto p = type_prf({judged({"A", "B"}, {out({"A"})})});
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 0.5);
  EXPECT_DOUBLE_EQ(p.f1, 2.0 / 3.0);
  const auto fp = type_prf({judged({}, {out({"A"})})});
  EXPECT_EQ(fp.fp, 1u);
  EXPECT_EQ(fp.precision, 0.0);
  const auto exact = type_prf({judged({"A"}, {out({"A"})}), judged({"B", "C"}, {out({"B", "C"})})});
  EXPECT_EQ(exact.f1, 1.0);
  const auto none = type_prf({judged({}, {out({}, true)})});
  EXPECT_EQ(none.f1, 1.0);
  EXPECT_TRUE(none.degenerate);
}

TEST(TypePrf, UnknownNamesAreFalsePositives) {
  auto o = out({"A"});
  o.unknown_types = {"Blurry"};
  const auto p = type_prf({judged({"A"}, {o})});
  EXPECT_EQ(p.tp, 1u);
  EXPECT_EQ(p.fp, 1u);
}

TEST(PassAtK, UnionSemantics) {
  const std::vector<CaseJudgment> js = {judged({"A"}, {out({}, true), out({"A"})})};
  EXPECT_EQ(pass_at_k(js, 1).recall, 0.0);
  EXPECT_EQ(pass_at_k(js, 2).recall, 1.0);
  EXPECT_EQ(pass_at_k(js, 2, PassMode::BestOfK).f1, 1.0);
  EXPECT_THROW(pass_at_k(js, 3), ValidationError);
}

TEST(PassAtK, PrecisionMayDrop) {
  const std::vector<CaseJudgment> js = {judged({"A"}, {out({"A"}), out({"A", "B"})})};
  EXPECT_EQ(pass_at_k(js, 1).precision, 1.0);
  EXPECT_EQ(pass_at_k(js, 2).precision, 0.5);
}

TEST(Join, PairsSamplesInOrder) {
  ParsingCase c;
  c.id = "x";
  c.gold_errors = {"A"};
  std::vector<cocl::JudgeRecord> rs = {{"x", 1, out({"B"})}, {"x", 0, out({"A"})}};
  const auto js = join({c}, rs);
  ASSERT_EQ(js[0].predictions.size(), 2u);
  EXPECT_EQ(js[0].predictions[0].detected, (std::set<std::string>{"A"}));
  EXPECT_THROW(join({c}, {}), ValidationError);
  rs.push_back({"y", 0, out({})});
  EXPECT_THROW(join({c}, rs), ValidationError);
}

TEST(Report, TotalsAndEmpty) {
  auto bad_format = out({}, false);
  bad_format.format_ok = false;
  std::vector<CaseJudgment> js = {judged({"A"}, {out({"A"})}), judged({}, {out({"A"})}),
                                  judged({"B"}, {bad_format})};
  js[1].element = ElementKind::Table;
  const auto r = build_report(js);
  const auto& all = r.per_element.at("overall");
  EXPECT_EQ(all.cases, 3u);
  EXPECT_EQ(all.case_scores.tp + all.case_scores.fp + all.case_scores.fn + all.case_scores.tn, 3u);
  EXPECT_EQ(all.format_failures, 1u);
  EXPECT_EQ(r.per_element.at("table").cases, 1u);
  EXPECT_EQ(all.per_type.at("A").tp, 1u);
  EXPECT_EQ(all.per_type.at("A").fp, 1u);
  EXPECT_EQ(all.per_type.at("B").fn, 1u);
  const auto empty = build_report({});
  EXPECT_TRUE(empty.empty);
  EXPECT_EQ(empty.per_element.at("overall").cases, 0u);
}

TEST(Report, MatchesCheckedInFixture) {
  const std::filesystem::path dir = std::filesystem::path(DOCINSPECT_TEST_DATA) / "fixtures/judge";
  const auto js = join(read_cases_file((dir / "cases.jsonl").string()),
                       cocl::read_judge_records_file((dir / "judgments.jsonl").string()));
  const Json want = Json::parse(fixtures::read_file((dir / "report.json").string()));
  EXPECT_EQ(Json::parse(to_json(build_report(js, 3)).dump()), want);
}

}  // namespace
}  // namespace docinspect::metrics
