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
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/receipt.hpp"
#include "docinspect/rng.hpp"

namespace docinspect::text {

struct TextRuleParams {
  std::size_t short_text_threshold = 60;  // scalar values
  std::size_t min_inline_tokens = 6;
  int title_hashes_min = 1, title_hashes_max = 3;
  int newline_insert_min = 1, newline_insert_max = 5;
  int repetition_min = 10, repetition_max = 20;
  int cjk_delete_min = 1, cjk_delete_max = 5;
  int word_delete_min = 1, word_delete_max = 3;
  int latin_char_delete_min = 1, latin_char_delete_max = 5;
  int space_edit_min = 1, space_edit_max = 3;
  std::size_t donor_fragment_max = 40;  // graphemes
};

struct Donor {
  std::string id;
  std::string text;
};

struct TextPerturbation {
  std::string output;
  PerturbationReceipt receipt;
};

// One formula region inside running text; offsets are scalar values.
struct FormulaRegion {
  std::size_t start = 0;  // first delimiter character
  std::size_t end = 0;    // one past the closing delimiter
  std::size_t inner_start = 0;
  std::size_t inner_end = 0;
  bool display = false;  // $$...$$ or \[...\]
};

// Formula regions in reading order. Unclosed delimiters are ignored.
std::vector<FormulaRegion> find_formula_regions(std::u32string_view text);

// Lines that start with a list marker ("1.", "(1)", "-", "•", CJK
// enumerators, circled numbers). Returns the scalar offset of each marker.
std::vector<std::size_t> find_list_markers(std::u32string_view text);

TextPerturbation misrecognize_as_title(std::string_view text, Rng& rng, const TextRuleParams& p = {});
TextPerturbation paragraph_format_error(std::string_view text, Rng& rng, const TextRuleParams& p = {});
TextPerturbation list_format_error(std::string_view text, Rng& rng, const TextRuleParams& p = {});
TextPerturbation title_format_error(std::string_view text);
TextPerturbation superscript_citation_error(std::string_view text);
TextPerturbation text_repetition(std::string_view text, Rng& rng, const TextRuleParams& p = {});
TextPerturbation text_redundancy(std::string_view text, const std::vector<Donor>& donor_pool, Rng& rng,
                                 const TextRuleParams& p = {});
TextPerturbation text_segment_lost(std::string_view text, Rng& rng);
TextPerturbation characters_lost(std::string_view text, Rng& rng, const TextRuleParams& p = {});
TextPerturbation punctuation_error(std::string_view text, Rng& rng);
TextPerturbation space_error(std::string_view text, Rng& rng, const TextRuleParams& p = {});
TextPerturbation inline_formula_missed(std::string_view text, Rng& rng);
TextPerturbation inline_formula_error(std::string_view text, Rng& rng, const TextRuleParams& p = {});

// Error type ids handled by the rule-based text injectors.
const std::vector<std::string>& rule_based_types();
bool is_rule_based(std::string_view error_type);

struct TextContext {
  std::vector<Donor> donor_pool;
  TextRuleParams params;
};

// Dispatches to the injector for `error_type`. Throws PreconditionError when
// the rule cannot apply and ValidationError for an id with no text rule.
TextPerturbation apply_rule(std::string_view error_type, std::string_view text, Rng& rng,
                            const TextContext& ctx = {});

}  // namespace docinspect::text
