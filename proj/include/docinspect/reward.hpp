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

#include <set>
#include <string>
#include <string_view>

#include "docinspect/cocl.hpp"

namespace docinspect::reward {

enum class Branch { GoodCase, BadCase };
std::string_view to_string(Branch b);

struct RewardScore {
  double s_format = 0;
  double s_f1 = 0;
  double s_recall = 0;
  double s_precision = 0;
  double total = 0;
  Branch branch = Branch::BadCase;
};

// Component weights; all 1 by default. graded_format replaces the binary
// format score with the fraction of format checks passed.
struct RewardOptions {
  double w_format = 1;
  double w_f1 = 1;
  double w_recall = 1;
  double w_precision = 1;
  bool graded_format = false;
};

// Branch follows the gold label. Bad case: format + F1 + recall. Good case:
// format + precision, where precision is 1 for a Good verdict and 0 for a Bad
// verdict or any detection. Unknown type names count as wrong detections.
RewardScore asymmetric_reward(const std::set<std::string>& gold, const cocl::JudgeOutput& output,
                              const RewardOptions& options = {});

// format + per-case F1 (1 when gold and prediction are both empty).
RewardScore f1_reward(const std::set<std::string>& gold, const cocl::JudgeOutput& output,
                      const RewardOptions& options = {});

// Fraction of format checks passed: one valid answer tag, balanced
// error_type tags, and no error types under a Good answer.
double graded_format_score(std::string_view raw);

}  // namespace docinspect::reward
