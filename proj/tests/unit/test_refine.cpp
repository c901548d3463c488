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
#include "docinspect/refine.hpp"
#include "e2e.hpp"

namespace docinspect::client {
namespace {

ParsingCase refine_case() {
  ParsingCase c;
  c.id = "case-refine";
  c.element = ElementKind::Text;
  c.ground_truth = "Layout analysis precedes recognition of every element.";
  c.prediction = "Layout analysis precedes recognition of every elment,";
  c.gold_errors = {"text_characters_lost", "text_punctuation_error"};
  return c;
}

const char* kRaw =
    "<think>One letter of 'element' is missing and the final period became a comma.</think>\n"
    "<answer>Badcase.</answer>\n<error_type>Text characters lost</error_type>\n"
    "<error_type>Text punctuation recognition error</error_type>";

TEST(Refine, DetailedMatchesGolden) {
  const auto got = build_refiner_prompt(RefineMode::DetailedGuidance, refine_case(), cocl::parse_judge_output(kRaw));
  ASSERT_TRUE(got);
  const auto path = std::filesystem::path(DOCINSPECT_TEST_DATA) / "golden/prompts/refine_detailed.txt";
  EXPECT_EQ(*got, fixtures::read_file(path.string()));
}

TEST(Refine, NoGuidanceHasNoFeedback) {
  const auto got = build_refiner_prompt(RefineMode::NoGuidance, refine_case(), std::nullopt);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->find("Quality Control Feedback:"), std::string::npos);
  EXPECT_NE(got->find("elment,"), std::string::npos);
}

TEST(Refine, BinaryOnlyRewritesBadCases) {
  const auto judge = cocl::parse_judge_output(kRaw);
  const auto bg = build_refiner_prompt(RefineMode::BinaryGuidance, refine_case(), judge);
  ASSERT_TRUE(bg);
  EXPECT_EQ(*bg, *build_refiner_prompt(RefineMode::NoGuidance, refine_case(), std::nullopt));
  const auto good = cocl::parse_judge_output("<answer>Goodcase.</answer>");
  EXPECT_FALSE(build_refiner_prompt(RefineMode::BinaryGuidance, refine_case(), good));
  EXPECT_FALSE(build_refiner_prompt(RefineMode::DetailedGuidance, refine_case(), good));
}

TEST(Refine, JudgeRequired) {
  EXPECT_THROW(build_refiner_prompt(RefineMode::DetailedGuidance, refine_case(), std::nullopt), ValidationError);
  EXPECT_THROW(build_refiner_prompt(RefineMode::BinaryGuidance, refine_case(), std::nullopt), ValidationError);
}

TEST(Refine, ModeNames) {
  EXPECT_EQ(parse_refine_mode("DG"), RefineMode::DetailedGuidance);
  EXPECT_EQ(parse_refine_mode("binary"), RefineMode::BinaryGuidance);
  EXPECT_EQ(to_string(RefineMode::NoGuidance), "none");
  EXPECT_THROW(parse_refine_mode("loud"), ValidationError);
}

}  // namespace
}  // namespace docinspect::client
