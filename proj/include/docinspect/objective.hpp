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
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/cocl.hpp"
#include "docinspect/corpus.hpp"
#include "docinspect/table.hpp"

namespace docinspect::objective {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
// Levenshtein over scalar values divided by the longer length; 0 when both are empty.
double edit_distance_norm(std::string_view a, std::string_view b);

// Ordered labeled tree: table -> tr -> td/th.
struct TreeNode {
  std::string tag;
  int colspan = 1;
  int rowspan = 1;
  std::string text;
  std::vector<TreeNode> children;
};

TreeNode table_tree(const table::TableGrid& grid);
std::size_t tree_size(const TreeNode& node);

// Unit insert and delete. Renaming costs 1 when tag or spans differ, else
// the normalized edit distance of the cell texts (0 when structure_only).
double rename_cost(const TreeNode& a, const TreeNode& b, bool structure_only);
// Exact ordered tree edit distance (Zhang-Shasha).
double tree_edit_distance(const TreeNode& a, const TreeNode& b, bool structure_only);

struct TedsResult {
  double score = 0;
  bool prediction_unparseable = false;
};

// 1 - TED / max(|T_pred|, |T_gt|). An unparseable prediction scores 0 and is
// flagged; an unparseable ground truth throws ValidationError.
TedsResult teds(std::string_view pred_html, std::string_view gt_html, bool structure_only);

// edit_distance for text and equations; teds and s_teds for tables.
std::map<std::string, double> case_metrics(const ParsingCase& c);

struct Bucket {
  std::size_t count = 0;
  std::map<std::string, double> mean;
  std::map<std::string, std::size_t> n;  // cases contributing to each mean
};

// Cases grouped by the judge's detected-error count ("good", "bad_1".."bad_4",
// "bad_unspecified" for a Bad verdict naming no type) and, for single-error
// verdicts, by type.
struct AlignmentReport {
  std::map<std::string, Bucket> by_count;
  std::map<std::string, Bucket> by_type;
};

struct AlignmentItem {
  std::string case_id;
  ElementKind element = ElementKind::Text;
  std::map<std::string, double> metrics;
  cocl::JudgeOutput judgment;
};

AlignmentReport alignment_report(const std::vector<AlignmentItem>& items);
// Uses the first judge sample of every case. Throws ValidationError when a
// case has no judgment.
std::vector<AlignmentItem> alignment_items(const std::vector<ParsingCase>& cases,
                                           const std::vector<cocl::JudgeRecord>& judgments);
OrderedJson to_json(const AlignmentReport& report);
std::string render_table(const AlignmentReport& report);

}  // namespace docinspect::objective
