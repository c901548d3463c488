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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/rng.hpp"

namespace docinspect::latex {

enum class TokenKind { Command, GroupOpen, GroupClose, Subscript, Superscript, Symbol, Letter, Digit, Space };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string lexeme;  // UTF-8
  std::size_t offset;  // in Unicode scalar values

  bool operator==(const Token&) const = default;
};

using TokenStream = std::vector<Token>;

// Lossless: concatenating every lexeme reproduces `src`. Commands are a
// backslash followed by ASCII letters or by one non-letter character;
// whitespace runs become one Space token; anything unrecognized is a Symbol.
TokenStream tokenize(std::string_view src);
std::string detokenize(std::span<const Token> tokens);

// Groups and \left/\right pairs balance (a \left opened inside a group must
// close in the same group; \middle needs an open \left).
bool validate_balanced(std::span<const Token> tokens);
inline bool validate_balanced(std::string_view src) { return validate_balanced(tokenize(src)); }

std::size_t significant_token_count(std::span<const Token> tokens);
std::size_t group_count(std::span<const Token> tokens);

// Removes one layer of outer math delimiters: $$..$$, $..$, \(..\), \[..\].
std::string_view strip_math_delimiters(std::string_view src);

// Token-sequence equality ignoring whitespace and outer delimiters.
bool equivalent(std::string_view a, std::string_view b);

enum class FormulaRule { Syntax, Structure, Character, PartialOmission };
std::string_view to_string(FormulaRule rule);
FormulaRule parse_formula_rule(std::string_view name);

struct KernelParams {
  std::size_t min_tokens = 6;          // for Character and Structure
  double max_omission_fraction = 0.30;  // of significant tokens
  int min_character_edits = 1;
  int max_character_edits = 5;
};

struct FormulaPerturbation {
  std::string latex;
  std::map<std::string, std::string> details;
};

// Confusion pairs (both directions), loaded from data/latex_confusions.tsv.
const std::multimap<std::string, std::string>& confusion_table();

// Rules whose precondition holds and that can change this input.
std::vector<FormulaRule> feasible_rules(std::span<const Token> tokens, const KernelParams& params = {});

// Applies one sub-rule. Structure, Character and PartialOmission outputs stay
// balanced; Syntax outputs never are. Throws PreconditionError when the rule
// is not feasible for the input.
FormulaPerturbation perturb_formula(std::span<const Token> tokens, FormulaRule rule, Rng& rng,
                                    const KernelParams& params = {});

}  // namespace docinspect::latex
