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

#include "docinspect/latex.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "docinspect/error.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::latex {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Command:
      return "command";
    case TokenKind::GroupOpen:
      return "group_open";
    case TokenKind::GroupClose:
      return "group_close";
    case TokenKind::Subscript:
      return "subscript";
    case TokenKind::Superscript:
      return "superscript";
    case TokenKind::Symbol:
      return "symbol";
    case TokenKind::Letter:
      return "letter";
    case TokenKind::Digit:
      return "digit";
    case TokenKind::Space:
      return "space";
  }
  return "unknown";
}

namespace {

bool ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

}  // namespace

TokenStream tokenize(std::string_view src) {
  const std::u32string s = unicode::decode(src);
  TokenStream out;
  std::size_t i = 0;
  auto emit = [&](TokenKind kind, std::size_t begin, std::size_t end) {
    out.push_back({kind, unicode::encode(std::u32string_view(s).substr(begin, end - begin)), begin});
  };
  while (i < s.size()) {
    const char32_t c = s[i];
    if (c == U'\\') {
      std::size_t j = i + 1;
      if (j < s.size() && ascii_letter(s[j])) {
        while (j < s.size() && ascii_letter(s[j])) ++j;
        emit(TokenKind::Command, i, j);
      } else if (j < s.size()) {
        emit(TokenKind::Command, i, j + 1);
        j = j + 1;
      } else {
        emit(TokenKind::Symbol, i, j);
      }
      i = j;
    } else if (c == U'{') {
      emit(TokenKind::GroupOpen, i, i + 1), ++i;
    } else if (c == U'}') {
      emit(TokenKind::GroupClose, i, i + 1), ++i;
    } else if (c == U'_') {
      emit(TokenKind::Subscript, i, i + 1), ++i;
    } else if (c == U'^') {
      emit(TokenKind::Superscript, i, i + 1), ++i;
    } else if (unicode::is_whitespace(c)) {
      std::size_t j = i;
      while (j < s.size() && unicode::is_whitespace(s[j])) ++j;
      emit(TokenKind::Space, i, j);
      i = j;
    } else if (c >= U'0' && c <= U'9') {
      emit(TokenKind::Digit, i, i + 1), ++i;
    } else if (unicode::is_letter(c)) {
      emit(TokenKind::Letter, i, i + 1), ++i;
    } else {
      emit(TokenKind::Symbol, i, i + 1), ++i;
    }
  }
  return out;
}

std::string detokenize(std::span<const Token> tokens) {
  std::string out;
  for (const auto& t : tokens) out += t.lexeme;
  return out;
}

bool validate_balanced(std::span<const Token> tokens) {
  std::vector<char> stack;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::GroupOpen) {
      stack.push_back('g');
    } else if (t.kind == TokenKind::GroupClose) {
      if (stack.empty() || stack.back() != 'g') return false;
      stack.pop_back();
    } else if (t.kind == TokenKind::Command) {
      if (t.lexeme == "\\left") {
        stack.push_back('l');
      } else if (t.lexeme == "\\right") {
        if (stack.empty() || stack.back() != 'l') return false;
        stack.pop_back();
      } else if (t.lexeme == "\\middle") {
        if (stack.empty() || stack.back() != 'l') return false;
      }
    }
  }
  return stack.empty();
}

std::size_t significant_token_count(std::span<const Token> tokens) {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.kind != TokenKind::Space; }));
}

std::size_t group_count(std::span<const Token> tokens) {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.kind == TokenKind::GroupOpen; }));
}

std::string_view strip_math_delimiters(std::string_view src) {
  auto trim = [](std::string_view s) {
    const char* ws = " \t\r\n";
    std::size_t b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return std::string_view{};
    std::size_t e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  std::string_view s = trim(src);
  auto wrapped = [&](std::string_view open, std::string_view close) {
    return s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
           s.substr(s.size() - close.size()) == close;
  };
  if (wrapped("$$", "$$") && s.size() >= 4) return trim(s.substr(2, s.size() - 4));
  if (wrapped("\\[", "\\]")) return trim(s.substr(2, s.size() - 4));
  if (wrapped("\\(", "\\)")) return trim(s.substr(2, s.size() - 4));
  if (wrapped("$", "$") && s.size() >= 2) return trim(s.substr(1, s.size() - 2));
  return s;
}

bool equivalent(std::string_view a, std::string_view b) {
  auto significant = [](std::string_view src) {
    std::vector<std::pair<TokenKind, std::string>> out;
    for (auto& t : tokenize(strip_math_delimiters(src))) {
      if (t.kind != TokenKind::Space) out.emplace_back(t.kind, std::move(t.lexeme));
    }
    return out;
  };
  return significant(a) == significant(b);
}

std::string_view to_string(FormulaRule rule) {
  switch (rule) {
    case FormulaRule::Syntax:
      return "syntax";
    case FormulaRule::Structure:
      return "structure";
    case FormulaRule::Character:
      return "character";
    case FormulaRule::PartialOmission:
      return "partial_omission";
  }
  return "unknown";
}

FormulaRule parse_formula_rule(std::string_view name) {
  if (name == "syntax") return FormulaRule::Syntax;
  if (name == "structure") return FormulaRule::Structure;
  if (name == "character") return FormulaRule::Character;
  if (name == "partial_omission") return FormulaRule::PartialOmission;
  throw ValidationError("unknown formula rule: '" + std::string(name) + "'");
}

const std::multimap<std::string, std::string>& confusion_table() {
  static const std::multimap<std::string, std::string> table = [] {
    std::set<std::pair<std::string, std::string>> pairs;
    std::string_view text = resources::get("latex_confusions.tsv");
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      if (line.empty() || line.front() == '#') continue;
      std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) continue;
      std::string a(line.substr(0, tab));
      std::string b(line.substr(tab + 1));
      while (!b.empty() && (b.back() == '\r' || b.back() == ' ')) b.pop_back();
      pairs.emplace(a, b);
      pairs.emplace(b, a);
    }
    return std::multimap<std::string, std::string>(pairs.begin(), pairs.end());
  }();
  return table;
}

namespace {

bool is_letter_command(const Token& t) {
  return t.kind == TokenKind::Command && t.lexeme.size() > 1 &&
         ascii_letter(static_cast<unsigned char>(t.lexeme[1]));
}

// Index of the next non-space token at or after i, or npos.
std::size_t skip_space(std::span<const Token> t, std::size_t i) {
  while (i < t.size() && t[i].kind == TokenKind::Space) ++i;
  return i < t.size() ? i : std::string_view::npos;
}

// Index of the GroupClose matching the GroupOpen at `open`, or npos.
std::size_t matching_close(std::span<const Token> t, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < t.size(); ++i) {
    if (t[i].kind == TokenKind::GroupOpen) ++depth;
    if (t[i].kind == TokenKind::GroupClose && --depth == 0) return i;
  }
  return std::string_view::npos;
}

// Group argument starting at the first non-space token after `after`.
struct GroupSpan {
  std::size_t open;
  std::size_t close;
};

std::optional<GroupSpan> group_after(std::span<const Token> t, std::size_t after) {
  std::size_t i = skip_space(t, after);
  if (i == std::string_view::npos || t[i].kind != TokenKind::GroupOpen) return std::nullopt;
  std::size_t c = matching_close(t, i);
  if (c == std::string_view::npos) return std::nullopt;
  return GroupSpan{i, c};
}

std::size_t significant_between(std::span<const Token> t, std::size_t begin, std::size_t end) {
  std::size_t n = 0;
  for (std::size_t i = begin; i < end; ++i) n += t[i].kind != TokenKind::Space;
  return n;
}

// Tokens inside \begin{...} / \end{...} arguments are environment names, not characters.
std::vector<bool> protected_mask(std::span<const Token> t) {
  std::vector<bool> mask(t.size(), false);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].kind == TokenKind::Command && (t[i].lexeme == "\\begin" || t[i].lexeme == "\\end")) {
      if (auto g = group_after(t, i + 1)) {
        for (std::size_t k = g->open; k <= g->close; ++k) mask[k] = true;
      }
    }
  }
  return mask;
}

std::vector<std::string> char_replacements(const TokenStream& t, std::size_t i) {
  const Token& tok = t[i];
  std::vector<std::string> options;
  auto [lo, hi] = confusion_table().equal_range(tok.lexeme);
  for (auto it = lo; it != hi; ++it) options.push_back(it->second);
  if (tok.kind == TokenKind::Letter && tok.lexeme.size() == 1) {
    char c = tok.lexeme[0];
    if (c >= 'a' && c <= 'z') options.emplace_back(1, static_cast<char>(c - 'a' + 'A'));
    if (c >= 'A' && c <= 'Z') options.emplace_back(1, static_cast<char>(c - 'A' + 'a'));
  }
  // A replacement must not merge with its neighbours into a different token.
  std::vector<std::string> valid;
  for (auto& r : options) {
    if (r == tok.lexeme || r.empty()) continue;
    const bool r_is_command = r[0] == '\\';
    const bool r_starts_letter = ascii_letter(static_cast<unsigned char>(r[0]));
    if (r_is_command && i + 1 < t.size() && t[i + 1].kind == TokenKind::Letter) continue;
    if (r_starts_letter && i > 0 && is_letter_command(t[i - 1])) continue;
    valid.push_back(std::move(r));
  }
  std::sort(valid.begin(), valid.end());
  valid.erase(std::unique(valid.begin(), valid.end()), valid.end());
  return valid;
}

std::vector<std::size_t> character_candidates(const TokenStream& t) {
  std::vector<bool> mask = protected_mask(t);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (mask[i]) continue;
    const Token& tok = t[i];
    bool eligible = tok.kind == TokenKind::Letter || tok.kind == TokenKind::Digit ||
                    (tok.kind == TokenKind::Command && confusion_table().count(tok.lexeme) > 0);
    if (eligible && !char_replacements(t, i).empty()) out.push_back(i);
  }
  return out;
}

const std::map<std::string, std::string>& operator_swaps() {
  static const std::map<std::string, std::string> swaps = {
      {"\\hat", "\\vec"},   {"\\vec", "\\hat"},           {"\\bar", "\\overline"},
      {"\\overline", "\\bar"}, {"\\tilde", "\\widetilde"}, {"\\widetilde", "\\tilde"},
      {"\\dot", "\\ddot"},  {"\\ddot", "\\dot"},          {"\\check", "\\breve"},
      {"\\breve", "\\check"}};
  return swaps;
}

bool is_frac(const Token& t) {
  return t.kind == TokenKind::Command && (t.lexeme == "\\frac" || t.lexeme == "\\dfrac" || t.lexeme == "\\tfrac");
}

bool is_atom(const Token& t) {
  switch (t.kind) {
    case TokenKind::Letter:
    case TokenKind::Digit:
    case TokenKind::Symbol:
      return true;
    case TokenKind::Command:
      return t.lexeme != "\\left" && t.lexeme != "\\right" && t.lexeme != "\\middle" && !is_frac(t) &&
             t.lexeme != "\\sqrt" && t.lexeme != "\\begin" && t.lexeme != "\\end" &&
             operator_swaps().count(t.lexeme) == 0;
    default:
      return false;
  }
}

// One candidate structural edit, as a function producing the edited stream.
struct StructureEdit {
  std::string kind;
  std::size_t position;
  TokenStream result;
};

TokenStream without(const TokenStream& t, std::set<std::size_t> drop) {
  TokenStream out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!drop.count(i)) out.push_back(t[i]);
  }
  return out;
}

std::vector<StructureEdit> structure_edits(const TokenStream& t) {
  std::vector<StructureEdit> edits;
  const std::string original = detokenize(t);
  auto add = [&](std::string kind, std::size_t pos, TokenStream result) {
    if (detokenize(result) != original && validate_balanced(result)) {
      edits.push_back({std::move(kind), pos, std::move(result)});
    }
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Token& tok = t[i];
    if (is_frac(tok)) {
      auto a = group_after(t, i + 1);
      if (a) {
        auto b = group_after(t, a->close + 1);
        if (b) {
          TokenStream r(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(a->open));
          r.insert(r.end(), t.begin() + static_cast<std::ptrdiff_t>(b->open),
                   t.begin() + static_cast<std::ptrdiff_t>(b->close) + 1);
          r.insert(r.end(), t.begin() + static_cast<std::ptrdiff_t>(a->close) + 1,
                   t.begin() + static_cast<std::ptrdiff_t>(b->open));
          r.insert(r.end(), t.begin() + static_cast<std::ptrdiff_t>(a->open),
                   t.begin() + static_cast<std::ptrdiff_t>(a->close) + 1);
          r.insert(r.end(), t.begin() + static_cast<std::ptrdiff_t>(b->close) + 1, t.end());
          add("swap_frac_arguments", i, std::move(r));
        }
      }
    }
    if (tok.kind == TokenKind::Subscript || tok.kind == TokenKind::Superscript) {
      if (auto g = group_after(t, i + 1); g && g->close > g->open + 1) {
        add("drop_script_braces", i, without(t, {g->open, g->close}));
      }
    }
    if (tok.kind == TokenKind::Command && tok.lexeme == "\\sqrt") {
      if (auto g = group_after(t, i + 1)) {
        // Extend the argument over the next atom, or shrink it by its last atom.
        std::size_t next = skip_space(t, g->close + 1);
        if (next != std::string_view::npos && is_atom(t[next])) {
          TokenStream r;
          for (std::size_t k = 0; k < t.size(); ++k) {
            if (k == g->close) continue;
            r.push_back(t[k]);
            if (k == next) r.push_back(t[g->close]);
          }
          add("sqrt_boundary_shift", i, std::move(r));
        }
        std::size_t last = g->close;
        while (last > g->open + 1 && t[last - 1].kind == TokenKind::Space) --last;
        if (last > g->open + 1 && is_atom(t[last - 1]) && significant_between(t, g->open + 1, g->close) >= 2) {
          TokenStream r;
          for (std::size_t k = 0; k < t.size(); ++k) {
            if (k == g->close) continue;
            if (k == last - 1) r.push_back(t[g->close]);
            r.push_back(t[k]);
          }
          add("sqrt_boundary_shift", i, std::move(r));
        }
      }
    }
    if (tok.kind == TokenKind::Command && operator_swaps().count(tok.lexeme)) {
      TokenStream r = t;
      r[i].lexeme = operator_swaps().at(tok.lexeme);
      // \bar{x} -> \overline{x} can't merge: the next token is a group or space.
      if (i + 1 < t.size() && t[i + 1].kind == TokenKind::Letter) continue;
      add("operator_swap", i, std::move(r));
    }
  }
  // Matched bracket pairs that are not \left/\right delimiters.
  auto bracket_pairs = [&](std::string_view open, std::string_view close, TokenKind kind) {
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i].kind != kind) continue;
      bool sized = i > 0 && t[i - 1].kind == TokenKind::Command &&
                   (t[i - 1].lexeme == "\\left" || t[i - 1].lexeme == "\\right" ||
                    t[i - 1].lexeme == "\\middle" || t[i - 1].lexeme.rfind("\\big", 0) == 0 ||
                    t[i - 1].lexeme.rfind("\\Big", 0) == 0);
      if (sized) continue;
      if (t[i].lexeme == open) stack.push_back(i);
      if (t[i].lexeme == close && !stack.empty()) {
        std::size_t o = stack.back();
        stack.pop_back();
        add("bracket_deletion", o, without(t, {o, i}));
      }
    }
  };
  bracket_pairs("(", ")", TokenKind::Symbol);
  bracket_pairs("[", "]", TokenKind::Symbol);
  bracket_pairs("\\{", "\\}", TokenKind::Command);
  return edits;
}

struct OmissionUnit {
  std::size_t begin;
  std::size_t end;  // exclusive
  std::string kind;
};

const std::set<std::string>& one_argument_commands() {
  static const std::set<std::string> cmds = {
      "\\sqrt", "\\hat", "\\vec", "\\bar", "\\overline", "\\underline", "\\tilde", "\\widetilde",
      "\\dot", "\\ddot", "\\mathrm", "\\mathbf", "\\mathit", "\\mathcal", "\\mathbb", "\\text",
      "\\operatorname", "\\boldsymbol", "\\check", "\\breve", "\\widehat"};
  return cmds;
}

std::vector<OmissionUnit> omission_units(const TokenStream& t, std::size_t budget) {
  std::vector<OmissionUnit> units;
  const std::size_t total = significant_token_count(t);
  auto add = [&](std::size_t b, std::size_t e, std::string kind) {
    std::size_t n = significant_between(t, b, e);
    if (n == 0 || n > budget || n >= total) return;
    TokenStream r(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(b));
    r.insert(r.end(), t.begin() + static_cast<std::ptrdiff_t>(e), t.end());
    if (!validate_balanced(r)) return;
    units.push_back({b, e, std::move(kind)});
  };
  std::vector<bool> claimed(t.size(), false);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Token& tok = t[i];
    if (tok.kind == TokenKind::Subscript || tok.kind == TokenKind::Superscript) {
      if (auto g = group_after(t, i + 1)) {
        add(i, g->close + 1, "script");
        claimed[g->open] = true;
      }
    } else if (is_frac(tok)) {
      if (auto a = group_after(t, i + 1)) {
        claimed[a->open] = true;
        if (auto b = group_after(t, a->close + 1)) {
          claimed[b->open] = true;
          add(i, b->close + 1, "fraction");
        }
      }
    } else if (tok.kind == TokenKind::Command && one_argument_commands().count(tok.lexeme)) {
      if (auto g = group_after(t, i + 1)) {
        claimed[g->open] = true;
        add(i, g->close + 1, "command");
      }
    } else if (tok.kind == TokenKind::GroupOpen && !claimed[i]) {
      bool after_command = false;
      for (std::size_t k = i; k-- > 0;) {
        if (t[k].kind == TokenKind::Space) continue;
        after_command = t[k].kind == TokenKind::Command && t[k].lexeme != "\\\\";
        break;
      }
      std::size_t c = matching_close(t, i);
      if (!after_command && c != std::string_view::npos) add(i, c + 1, "group");
    }
  }
  return units;
}

}  // namespace

std::vector<FormulaRule> feasible_rules(std::span<const Token> tokens, const KernelParams& params) {
  TokenStream t(tokens.begin(), tokens.end());
  std::vector<FormulaRule> out;
  if (!validate_balanced(t) || significant_token_count(t) == 0) return out;
  out.push_back(FormulaRule::Syntax);
  const bool long_enough = significant_token_count(t) >= params.min_tokens;
  if (long_enough && !structure_edits(t).empty()) out.push_back(FormulaRule::Structure);
  if (long_enough && !character_candidates(t).empty()) out.push_back(FormulaRule::Character);
  const auto budget = static_cast<std::size_t>(params.max_omission_fraction * static_cast<double>(significant_token_count(t)));
  if (group_count(t) >= 2 && !omission_units(t, budget).empty()) out.push_back(FormulaRule::PartialOmission);
  return out;
}

FormulaPerturbation perturb_formula(std::span<const Token> tokens, FormulaRule rule, Rng& rng,
                                    const KernelParams& params) {
  TokenStream t(tokens.begin(), tokens.end());
  if (!validate_balanced(t)) throw PreconditionError("input formula is not balanced");
  const std::size_t significant = significant_token_count(t);
  if (significant == 0) throw PreconditionError("empty formula");
  FormulaPerturbation out;
  out.details["sub_rule"] = std::string(to_string(rule));

  switch (rule) {
    case FormulaRule::Character: {
      if (significant < params.min_tokens) throw PreconditionError("formula too short for character rule");
      auto candidates = character_candidates(t);
      if (candidates.empty()) throw PreconditionError("no substitutable characters");
      const auto want = static_cast<std::size_t>(
          rng.between(params.min_character_edits, std::min<std::int64_t>(params.max_character_edits,
                                                                           static_cast<std::int64_t>(candidates.size()))));
      auto picks = rng.sample_indices(candidates.size(), want);
      std::string changes;
      int applied = 0;
      for (std::size_t p : picks) {
        std::size_t i = candidates[p];
        auto options = char_replacements(t, i);
        if (options.empty()) continue;
        std::string repl = options[rng.below(options.size())];
        if (!changes.empty()) changes += ";";
        changes += t[i].lexeme + "->" + repl;
        t[i].lexeme = repl;
        auto retok = tokenize(repl);
        t[i].kind = retok.empty() ? t[i].kind : retok.front().kind;
        ++applied;
      }
      if (applied == 0) throw PreconditionError("no substitutable characters");
      out.latex = detokenize(t);
      out.details["edits"] = std::to_string(applied);
      out.details["changes"] = changes;
      break;
    }
    case FormulaRule::Structure: {
      if (significant < params.min_tokens) throw PreconditionError("formula too short for structure rule");
      auto edits = structure_edits(t);
      if (edits.empty()) throw PreconditionError("no structural edit applies");
      std::vector<std::string> kinds;
      for (const auto& e : edits) {
        if (std::find(kinds.begin(), kinds.end(), e.kind) == kinds.end()) kinds.push_back(e.kind);
      }
      const std::string& kind = kinds[rng.below(kinds.size())];
      std::vector<const StructureEdit*> of_kind;
      for (const auto& e : edits) {
        if (e.kind == kind) of_kind.push_back(&e);
      }
      const StructureEdit& chosen = *of_kind[rng.below(of_kind.size())];
      out.latex = detokenize(chosen.result);
      out.details["edit"] = chosen.kind;
      out.details["token_index"] = std::to_string(chosen.position);
      break;
    }
    case FormulaRule::PartialOmission: {
      if (group_count(t) < 2) throw PreconditionError("partial omission needs at least two groups");
      const auto budget = static_cast<std::size_t>(params.max_omission_fraction * static_cast<double>(significant));
      auto units = omission_units(t, budget);
      if (units.empty()) throw PreconditionError("no sub-formula short enough to omit");
      const OmissionUnit& u = units[rng.below(units.size())];
      TokenStream r(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(u.begin));
      r.insert(r.end(), t.begin() + static_cast<std::ptrdiff_t>(u.end), t.end());
      out.latex = detokenize(r);
      out.details["omitted"] = detokenize(std::span<const Token>(t).subspan(u.begin, u.end - u.begin));
      out.details["unit"] = u.kind;
      break;
    }
    case FormulaRule::Syntax: {
      std::vector<std::size_t> opens, closes;
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].kind == TokenKind::GroupOpen) opens.push_back(i);
        if (t[i].kind == TokenKind::GroupClose) closes.push_back(i);
      }
      std::vector<std::string> options = {"insert_open_brace", "insert_unmatched_left", "insert_unmatched_right"};
      if (!closes.empty()) options.push_back("delete_close_brace");
      if (!opens.empty()) options.push_back("delete_open_brace");
      rng.shuffle(options);
      for (const auto& option : options) {
        TokenStream r = t;
        if (option == "delete_close_brace") {
          r.erase(r.begin() + static_cast<std::ptrdiff_t>(closes[rng.below(closes.size())]));
        } else if (option == "delete_open_brace") {
          r.erase(r.begin() + static_cast<std::ptrdiff_t>(opens[rng.below(opens.size())]));
        } else {
          std::vector<Token> inserted;
          if (option == "insert_open_brace") inserted = {{TokenKind::GroupOpen, "{", 0}};
          if (option == "insert_unmatched_left")
            inserted = {{TokenKind::Command, "\\left", 0}, {TokenKind::Symbol, "(", 0}};
          if (option == "insert_unmatched_right")
            inserted = {{TokenKind::Command, "\\right", 0}, {TokenKind::Symbol, ")", 0}};
          std::size_t at = rng.below(r.size() + 1);
          r.insert(r.begin() + static_cast<std::ptrdiff_t>(at), inserted.begin(), inserted.end());
        }
        std::string latex = detokenize(r);
        if (!validate_balanced(tokenize(latex))) {
          out.latex = std::move(latex);
          out.details["edit"] = option;
          break;
        }
      }
      if (out.latex.empty()) throw PreconditionError("could not break formula syntax");
      break;
    }
  }
  return out;
}

}  // namespace docinspect::latex
