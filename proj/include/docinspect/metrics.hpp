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

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "docinspect/cocl.hpp"
#include "docinspect/corpus.hpp"

namespace docinspect::metrics {

struct CaseJudgment {
  std::string case_id;
  ElementKind element = ElementKind::Text;
  std::set<std::string> gold_errors;
  std::vector<cocl::JudgeOutput> predictions;  // samples in order
};

// Pairs every case with its judge samples (ordered by sample index). Throws
// ValidationError for a case without samples or a sample naming no case.
std::vector<CaseJudgment> join(const std::vector<ParsingCase>& cases, const std::vector<cocl::JudgeRecord>& records);

// Good-vs-Bad classification with Bad as the positive class. A prediction is
// Bad when its verdict is Bad. Ratios with a zero denominator are 0 and set
// `degenerate`.
struct CaseScores {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0, recall = 0, f1 = 0;
  double macro_f1 = 0;  // mean of the Bad-positive and Good-positive F1
  double accuracy = 0;
  bool degenerate = false;
};

CaseScores case_scores(const std::vector<CaseJudgment>& judgments);
// Throws ValidationError on an empty list.
double case_f1(const std::vector<CaseJudgment>& judgments);

// Micro-averaged set overlap over (case, type) pairs. Unknown type names in a
// prediction count as false positives. With nothing predicted and nothing
// gold, precision and recall are 1; any other zero denominator gives 0.
struct Prf {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
  bool degenerate = false;
};

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);
// Predicted set of one sample: detected ids plus unknown names tagged "?name".
std::set<std::string> predicted_set(const cocl::JudgeOutput& out);

Prf type_prf(const std::vector<CaseJudgment>& judgments);

enum class PassMode { Union, BestOfK };
// Scores the first k samples of each case: their union, or the single sample
// with the highest per-case F1. Throws ValidationError naming a case with
// fewer than k samples.
Prf pass_at_k(const std::vector<CaseJudgment>& judgments, std::size_t k, PassMode mode = PassMode::Union);

struct TypeCounts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct ElementReport {
  std::size_t cases = 0;
  CaseScores case_scores;
  Prf type;
  double type_macro_f1 = 0;
  std::map<std::string, TypeCounts> per_type;  // unknown names under "unknown"
  std::size_t format_failures = 0;
};

struct EvalReport {
  std::map<std::string, ElementReport> per_element;  // plus "overall"
  std::size_t k = 1;
  PassMode mode = PassMode::Union;
  bool empty = true;
};

EvalReport build_report(const std::vector<CaseJudgment>& judgments, std::size_t k = 1,
                        PassMode mode = PassMode::Union);
OrderedJson to_json(const EvalReport& report);
std::string render_table(const EvalReport& report);

}  // namespace docinspect::metrics
