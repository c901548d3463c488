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

#include "docinspect/perturb_text.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

#include "docinspect/corpus.hpp"
#include "docinspect/error.hpp"
#include "docinspect/latex.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::text {

namespace {

struct Edit {
  std::size_t start;
  std::size_t end;
  std::u32string replacement;
};

using Params = std::map<std::string, std::string>;

std::size_t trimmed_length(const std::u32string& s) { return unicode::trim_trailing(s).size(); }

bool has_visible(std::u32string_view s) {
  return std::any_of(s.begin(), s.end(), [](char32_t c) { return !unicode::is_whitespace(c); });
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t x : v) {
    if (!out.empty()) out += ",";
    out += std::to_string(x);
  }
  return out;
}

// Applies edits, derives output spans, and enforces the shared contracts:
// non-overlapping edits on grapheme boundaries, and an output that differs
// from the input under text canonical normalization.
TextPerturbation finish(std::string_view type, const std::u32string& in, std::vector<Edit> edits,
                        std::uint64_t seed, Params params) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
  const auto bounds = unicode::grapheme_boundaries(in);
  auto on_boundary = [&](std::size_t p) { return std::binary_search(bounds.begin(), bounds.end(), p); };
  for (std::size_t i = 0; i < edits.size(); ++i) {
    const Edit& e = edits[i];
    if (e.start > e.end || e.end > in.size()) throw std::logic_error("text edit out of range");
    if (!on_boundary(e.start) || !on_boundary(e.end)) throw std::logic_error("text edit splits a grapheme");
    if (i > 0 && edits[i - 1].end > e.start) throw std::logic_error("overlapping text edits");
    if (i > 0 && edits[i - 1].start == e.start && edits[i - 1].end == e.start && e.end == e.start) {
      throw std::logic_error("two insertions at one position");
    }
  }
  TextPerturbation out;
  std::u32string result;
  std::size_t cursor = 0;
  for (const Edit& e : edits) {
    result.append(in, cursor, e.start - cursor);
    const std::size_t at = result.size();
    result += e.replacement;
    out.receipt.spans_touched.push_back({at, result.size()});
    out.receipt.edits.push_back({e.start, e.end, unicode::encode(e.replacement)});
    cursor = e.end;
  }
  result.append(in, cursor, std::u32string::npos);
  out.output = unicode::encode(result);
  if (canonical_equal(ElementKind::Text, unicode::encode(in), out.output)) {
    throw PreconditionError("perturbation leaves the text unchanged");
  }
  out.receipt.error_type = std::string(type);
  out.receipt.rng_seed = seed;
  out.receipt.parameters = std::move(params);
  return out;
}

struct Grapheme {
  std::size_t start;
  std::size_t end;
};

std::vector<Grapheme> graphemes(const std::u32string& s) {
  auto b = unicode::grapheme_boundaries(s);
  std::vector<Grapheme> out;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back({b[i], b[i + 1]});
  return out;
}

bool is_space_char(char32_t c) { return c == U' ' || c == U'\t' || c == U'　'; }

std::size_t find_unescaped(std::u32string_view s, std::size_t from, std::u32string_view needle) {
  for (std::size_t j = from; j + needle.size() <= s.size();) {
    if (s[j] == U'\\' && needle[0] != U'\\') {
      j += 2;
      continue;
    }
    if (s.substr(j, needle.size()) == needle) return j;
    ++j;
  }
  return std::u32string_view::npos;
}

}  // namespace

std::vector<FormulaRegion> find_formula_regions(std::u32string_view s) {
  std::vector<FormulaRegion> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == U'\\' && i + 1 < s.size()) {
      const char32_t n = s[i + 1];
      if (n == U'(' || n == U'[') {
        std::u32string close = n == U'(' ? U"\\)" : U"\\]";
        std::size_t c = s.find(close, i + 2);
        if (c != std::u32string_view::npos) {
          out.push_back({i, c + 2, i + 2, c, n == U'['});
          i = c + 2;
          continue;
        }
      }
      i += 2;
      continue;
    }
    if (s[i] == U'$') {
      if (i + 1 < s.size() && s[i + 1] == U'$') {
        std::size_t c = find_unescaped(s, i + 2, U"$$");
        if (c != std::u32string_view::npos && c > i + 2) {
          out.push_back({i, c + 2, i + 2, c, true});
          i = c + 2;
          continue;
        }
        i += 2;
        continue;
      }
      std::size_t c = find_unescaped(s, i + 1, U"$");
      if (c != std::u32string_view::npos && c > i + 1) {
        out.push_back({i, c + 1, i + 1, c, false});
        i = c + 1;
        continue;
      }
    }
    ++i;
  }
  return out;
}

namespace {

struct ListMarker {
  std::size_t line_start;
  std::size_t start;
  std::size_t end;
  std::optional<std::size_t> glyph;  // position of an alterable glyph
};

bool is_cjk_numeral(char32_t c) { return std::u32string_view(U"一二三四五六七八九十").find(c) != std::u32string_view::npos; }

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

std::optional<ListMarker> marker_at(std::u32string_view s, std::size_t line_start) {
  std::size_t i = line_start;
  while (i < s.size() && is_space_char(s[i])) ++i;
  if (i >= s.size()) return std::nullopt;
  const std::size_t start = i;
  auto followed_by_space = [&](std::size_t p) { return p >= s.size() || unicode::is_whitespace(s[p]); };
  const char32_t c = s[i];
  if (is_digit(c)) {
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j < s.size()) {
      const char32_t d = s[j];
      if ((d == U'.' || d == U'．') && followed_by_space(j + 1)) return ListMarker{line_start, start, j + 1, j};
      if (d == U')' || d == U'）' || d == U'、') return ListMarker{line_start, start, j + 1, j};
    }
    return std::nullopt;
  }
  if (c == U'(' || c == U'（') {
    std::size_t j = i + 1;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j > i + 1 && j < s.size() && (s[j] == U')' || s[j] == U'）')) return ListMarker{line_start, start, j + 1, j};
    return std::nullopt;
  }
  if (std::u32string_view(U"-*•·●○▪").find(c) != std::u32string_view::npos && i + 1 < s.size() &&
      is_space_char(s[i + 1])) {
    return ListMarker{line_start, start, i + 1, i};
  }
  if (is_cjk_numeral(c)) {
    std::size_t j = i;
    while (j < s.size() && is_cjk_numeral(s[j])) ++j;
    if (j < s.size() && (s[j] == U'、' || s[j] == U'.' || s[j] == U'．')) return ListMarker{line_start, start, j + 1, j};
    return std::nullopt;
  }
  if (c >= U'①' && c <= U'⒛') return ListMarker{line_start, start, i + 1, i};
  if (((c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z')) && i + 1 < s.size() &&
      (s[i + 1] == U')' || s[i + 1] == U'.') && followed_by_space(i + 2)) {
    return ListMarker{line_start, start, i + 2, i + 1};
  }
  return std::nullopt;
}

std::vector<ListMarker> list_markers(std::u32string_view s) {
  std::vector<ListMarker> out;
  std::size_t line = 0;
  while (line <= s.size()) {
    if (auto m = marker_at(s, line)) out.push_back(*m);
    std::size_t nl = s.find(U'\n', line);
    if (nl == std::u32string_view::npos) break;
    line = nl + 1;
  }
  return out;
}

std::u32string altered_glyph(char32_t c) {
  static const std::map<char32_t, std::u32string> table = {
      {U'.', U"、"}, {U'．', U"."}, {U'、', U"."}, {U')', U"）"}, {U'）', U")"}, {U'-', U"—"},
      {U'*', U"-"},  {U'•', U"·"},  {U'·', U"•"},  {U'●', U"•"}, {U'○', U"o"}, {U'▪', U"■"}};
  if (auto it = table.find(c); it != table.end()) return it->second;
  if (c >= U'①' && c <= U'⑨') return std::u32string(1, static_cast<char32_t>(U'1' + (c - U'①')));
  return U"";
}

}  // namespace

std::vector<std::size_t> find_list_markers(std::u32string_view text) {
  std::vector<std::size_t> out;
  for (const auto& m : list_markers(text)) out.push_back(m.start);
  return out;
}

TextPerturbation misrecognize_as_title(std::string_view text, Rng& rng, const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  const std::size_t n = trimmed_length(in);
  if (n == 0) throw PreconditionError("empty input");
  if (n > p.short_text_threshold) throw PreconditionError("not short text");
  const auto k = rng.between(p.title_hashes_min, p.title_hashes_max);
  std::u32string prefix(static_cast<std::size_t>(k), U'#');
  prefix += U' ';
  return finish("text_misrecognized_as_title", in, {{0, 0, prefix}}, rng.seed(), {{"k", std::to_string(k)}});
}

TextPerturbation paragraph_format_error(std::string_view text, Rng& rng, const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  if (in.size() < 2) throw PreconditionError("text too short");
  const std::size_t n = trimmed_length(in);
  std::vector<Grapheme> newlines;
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i] == U'\n') newlines.push_back({i > 0 && in[i - 1] == U'\r' ? i - 1 : i, i + 1});
  }
  std::vector<std::size_t> slots;
  for (std::size_t b : unicode::grapheme_boundaries(in)) {
    if (b > 0 && b < n) slots.push_back(b);
  }
  if (newlines.empty() && slots.empty()) throw PreconditionError("no position for a paragraph edit");
  const bool remove = !newlines.empty() && (slots.empty() || rng.chance(0.5));
  std::vector<Edit> edits;
  Params params;
  if (remove) {
    const auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(newlines.size())));
    std::vector<std::size_t> removed;
    for (std::size_t i : rng.sample_indices(newlines.size(), k)) {
      edits.push_back({newlines[i].start, newlines[i].end, U""});
      removed.push_back(newlines[i].start);
    }
    params = {{"branch", "delete"}, {"k", std::to_string(k)}, {"positions", join(removed)}};
  } else {
    const auto want = rng.between(p.newline_insert_min, p.newline_insert_max);
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(want), slots.size());
    std::vector<std::size_t> at;
    for (std::size_t i : rng.sample_indices(slots.size(), k)) {
      edits.push_back({slots[i], slots[i], U"\n"});
      at.push_back(slots[i]);
    }
    params = {{"branch", "insert"}, {"k", std::to_string(k)}, {"positions", join(at)}};
  }
  return finish("text_paragraph_format_error", in, std::move(edits), rng.seed(), std::move(params));
}

TextPerturbation list_format_error(std::string_view text, Rng& rng, const TextRuleParams&) {
  const std::u32string in = unicode::decode(text);
  const auto markers = list_markers(in);
  if (markers.empty()) throw PreconditionError("no list structure");
  std::vector<Grapheme> joins;
  for (const auto& m : markers) {
    if (m.line_start == 0) continue;
    std::size_t nl = m.line_start - 1;
    joins.push_back({nl > 0 && in[nl - 1] == U'\r' ? nl - 1 : nl, nl + 1});
  }
  std::vector<Edit> edits;
  Params params;
  if (!joins.empty()) {
    const auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(joins.size())));
    std::vector<std::size_t> at;
    for (std::size_t i : rng.sample_indices(joins.size(), k)) {
      edits.push_back({joins[i].start, joins[i].end, U""});
      at.push_back(joins[i].start);
    }
    params = {{"sub_rule", "newline_removed"}, {"k", std::to_string(k)}, {"positions", join(at)}};
  } else {
    std::vector<const ListMarker*> alterable;
    for (const auto& m : markers) {
      if (m.glyph && !altered_glyph(in[*m.glyph]).empty()) alterable.push_back(&m);
    }
    if (alterable.empty()) throw PreconditionError("no list structure");
    const ListMarker& m = *alterable[rng.below(alterable.size())];
    edits.push_back({*m.glyph, *m.glyph + 1, altered_glyph(in[*m.glyph])});
    params = {{"sub_rule", "marker_altered"}, {"position", std::to_string(*m.glyph)}};
  }
  return finish("list_format_error", in, std::move(edits), rng.seed(), std::move(params));
}

TextPerturbation title_format_error(std::string_view text) {
  const std::u32string in = unicode::decode(text);
  std::size_t i = 0;
  while (i < in.size() && in[i] == U'#') ++i;
  if (i == 0) throw PreconditionError("no heading syntax");
  const std::size_t hashes = i;
  while (i < in.size() && is_space_char(in[i])) ++i;
  return finish("title_format_error", in, {{0, i, U""}}, 0, {{"level", std::to_string(hashes)}});
}

namespace {

const std::map<char32_t, char32_t>& script_chars() {
  static const std::map<char32_t, char32_t> table = [] {
    std::map<char32_t, char32_t> t = {{U'¹', U'1'}, {U'²', U'2'}, {U'³', U'3'}, {U'⁰', U'0'},
                                      {U'ⁱ', U'i'}, {U'⁺', U'+'}, {U'⁻', U'-'}, {U'⁼', U'='},
                                      {U'⁽', U'('}, {U'⁾', U')'}, {U'ⁿ', U'n'}, {U'₊', U'+'},
                                      {U'₋', U'-'}, {U'₌', U'='}, {U'₍', U'('}, {U'₎', U')'},
                                      {U'ₐ', U'a'}, {U'ₑ', U'e'}, {U'ₒ', U'o'}, {U'ₓ', U'x'}};
    for (char32_t d = 0; d < 10; ++d) {
      if (d >= 4) t[U'⁰' + d] = U'0' + d;
      t[U'₀' + d] = U'0' + d;
    }
    return t;
  }();
  return table;
}

std::string plain_script_token(const std::string& lexeme) {
  static const std::map<std::string, std::string> table = {
      {"\\dagger", "†"}, {"\\ddagger", "‡"}, {"\\ast", "*"}, {"\\star", "*"}, {"\\prime", "′"}, {"\\circ", "°"}};
  if (auto it = table.find(lexeme); it != table.end()) return it->second;
  return lexeme;
}

// Plain text of a formula made only of scripts ("^{12}", "{}^{a}_{b}"), or
// nullopt when anything else is present.
std::optional<std::string> pure_script_content(std::string_view latex_src) {
  using latex::TokenKind;
  auto tokens = latex::tokenize(latex_src);
  std::vector<latex::Token> t;
  for (auto& tok : tokens) {
    if (tok.kind != TokenKind::Space) t.push_back(tok);
  }
  std::size_t i = 0;
  if (t.size() >= 2 && t[0].kind == TokenKind::GroupOpen && t[1].kind == TokenKind::GroupClose) i = 2;
  std::string out;
  int scripts = 0;
  while (i < t.size()) {
    if (t[i].kind != TokenKind::Superscript && t[i].kind != TokenKind::Subscript) return std::nullopt;
    ++i;
    if (i >= t.size()) return std::nullopt;
    if (t[i].kind == TokenKind::GroupOpen) {
      int depth = 0;
      std::size_t j = i;
      for (; j < t.size(); ++j) {
        if (t[j].kind == TokenKind::GroupOpen) ++depth;
        if (t[j].kind == TokenKind::GroupClose && --depth == 0) break;
      }
      if (j >= t.size()) return std::nullopt;
      // Re-read the original slice so inner spacing survives.
      std::size_t from = t[i].offset + 1, to = t[j].offset;
      std::u32string src = unicode::decode(latex_src);
      std::string inner = unicode::trim(unicode::encode(std::u32string_view(src).substr(from, to - from)));
      auto inner_tokens = latex::tokenize(inner);
      std::string plain;
      for (const auto& it : inner_tokens) {
        if (it.kind == TokenKind::GroupOpen || it.kind == TokenKind::GroupClose) continue;
        plain += it.kind == TokenKind::Command ? plain_script_token(it.lexeme) : it.lexeme;
      }
      out += plain;
      i = j + 1;
    } else if (t[i].kind == TokenKind::GroupClose) {
      return std::nullopt;
    } else {
      out += t[i].kind == TokenKind::Command ? plain_script_token(t[i].lexeme) : t[i].lexeme;
      ++i;
    }
    ++scripts;
  }
  if (scripts == 0 || out.empty()) return std::nullopt;
  return out;
}

}  // namespace

TextPerturbation superscript_citation_error(std::string_view text) {
  const std::u32string in = unicode::decode(text);
  const auto regions = find_formula_regions(in);
  std::vector<Edit> edits;
  std::vector<bool> in_formula(in.size(), false);
  for (const auto& r : regions) {
    for (std::size_t k = r.start; k < r.end; ++k) in_formula[k] = true;
    std::string inner = unicode::encode(std::u32string_view(in).substr(r.inner_start, r.inner_end - r.inner_start));
    if (auto plain = pure_script_content(inner)) edits.push_back({r.start, r.end, unicode::decode(*plain)});
  }
  const auto gs = graphemes(in);
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    const auto& g = gs[gi];
    if (in_formula[g.start]) continue;
    if (g.end - g.start == 1) {
      auto it = script_chars().find(in[g.start]);
      if (it != script_chars().end()) {
        edits.push_back({g.start, g.end, std::u32string(1, it->second)});
        continue;
      }
    }
    // Bare ^{...} / _{...} in running text.
    const char32_t c = in[g.start];
    if ((c == U'^' || c == U'_') && g.start + 1 < in.size() && in[g.start + 1] == U'{') {
      std::size_t close = in.find(U'}', g.start + 2);
      if (close != std::u32string::npos && close > g.start + 2 &&
          std::none_of(in_formula.begin() + static_cast<std::ptrdiff_t>(g.start),
                       in_formula.begin() + static_cast<std::ptrdiff_t>(close + 1), [](bool b) { return b; })) {
        std::u32string content = in.substr(g.start + 2, close - g.start - 2);
        if (content.find(U'{') == std::u32string::npos) {
          edits.push_back({g.start, close + 1, content});
          while (gi + 1 < gs.size() && gs[gi + 1].start <= close) ++gi;
        }
      }
    }
  }
  // HTML-style <sup>..</sup> and <sub>..</sub> outside formulas.
  for (std::u32string tag : {U"sup", U"sub"}) {
    const std::u32string open = U"<" + tag + U">", close = U"</" + tag + U">";
    std::size_t pos = 0;
    while ((pos = in.find(open, pos)) != std::u32string::npos) {
      std::size_t c = in.find(close, pos + open.size());
      if (c == std::u32string::npos) break;
      if (!in_formula[pos]) edits.push_back({pos, c + close.size(), in.substr(pos + open.size(), c - pos - open.size())});
      pos = c + close.size();
    }
  }
  if (edits.empty()) throw PreconditionError("nothing to replace");
  // Drop edits nested inside an earlier one (e.g. a <sup> holding a ²).
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.start < b.start; });
  std::vector<Edit> kept;
  for (auto& e : edits) {
    if (!kept.empty() && e.start < kept.back().end) continue;
    kept.push_back(std::move(e));
  }
  const auto count = kept.size();
  return finish("superscript_citation_format_error", in, std::move(kept), 0, {{"replaced", std::to_string(count)}});
}

namespace {

// Graphemes whose first scalar is punctuation, restricted to [0, limit).
std::vector<Grapheme> punctuation_graphemes(const std::u32string& in, std::size_t limit) {
  std::vector<Grapheme> out;
  for (const auto& g : graphemes(in)) {
    if (g.start < limit && unicode::is_punctuation(in[g.start])) out.push_back(g);
  }
  return out;
}

}  // namespace

TextPerturbation text_repetition(std::string_view text, Rng& rng, const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  const std::size_t n = trimmed_length(in);
  std::vector<Grapheme> spans;
  std::size_t prev = 0;
  for (const auto& g : punctuation_graphemes(in, n)) {
    if (has_visible(std::u32string_view(in).substr(prev, g.end - prev))) spans.push_back({prev, g.end});
    prev = g.end;
  }
  if (prev < n && has_visible(std::u32string_view(in).substr(prev, n - prev))) spans.push_back({prev, n});
  if (spans.empty()) throw PreconditionError("no span to repeat");
  const Grapheme s = spans[rng.below(spans.size())];
  const auto k = rng.between(p.repetition_min, p.repetition_max);
  const std::u32string span = in.substr(s.start, s.end - s.start);
  std::u32string copies;
  for (std::int64_t i = 1; i < k; ++i) copies += span;
  return finish("text_repetition", in, {{s.end, s.end, copies}}, rng.seed(),
                {{"k", std::to_string(k)}, {"span", std::to_string(s.start) + "," + std::to_string(s.end)}});
}

TextPerturbation text_redundancy(std::string_view text, const std::vector<Donor>& donor_pool, Rng& rng,
                                 const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  std::vector<const Donor*> donors;
  for (const auto& d : donor_pool) {
    if (d.text != text && has_visible(unicode::decode(d.text))) donors.push_back(&d);
  }
  if (donors.empty()) throw PreconditionError("empty donor pool");
  const Donor& donor = *donors[rng.below(donors.size())];
  const std::u32string dtext = unicode::decode(donor.text);
  const auto dg = graphemes(dtext);
  const std::size_t max_len = std::min(dg.size(), std::max<std::size_t>(1, p.donor_fragment_max));
  std::u32string fragment;
  for (int attempt = 0; attempt < 16 && !has_visible(fragment); ++attempt) {
    const auto len = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_len)));
    const std::size_t first = rng.below(dg.size() - len + 1);
    fragment = dtext.substr(dg[first].start, dg[first + len - 1].end - dg[first].start);
  }
  if (!has_visible(fragment)) fragment = std::u32string(unicode::trim_trailing(dtext));
  const auto slots = unicode::grapheme_boundaries(in);
  const std::size_t at = in.empty() ? 0 : slots[rng.below(slots.size())];
  return finish("text_redundancy", in, {{at, at, fragment}}, rng.seed(),
                {{"donor_id", donor.id}, {"fragment", unicode::encode(fragment)}, {"offset", std::to_string(at)}});
}

TextPerturbation text_segment_lost(std::string_view text, Rng& rng) {
  const std::u32string in = unicode::decode(text);
  const auto marks = punctuation_graphemes(in, in.size());
  if (marks.size() < 2) throw PreconditionError("fewer than two punctuation marks");
  std::vector<Grapheme> gaps;
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    const std::size_t a = marks[i].end, b = marks[i + 1].start;
    if (b > a && has_visible(std::u32string_view(in).substr(a, b - a))) gaps.push_back({a, b});
  }
  if (gaps.empty()) throw PreconditionError("no content between punctuation marks");
  const Grapheme g = gaps[rng.below(gaps.size())];
  return finish("text_segment_lost", in, {{g.start, g.end, U""}}, rng.seed(),
                {{"removed", unicode::encode(in.substr(g.start, g.end - g.start))},
                 {"span", std::to_string(g.start) + "," + std::to_string(g.end)}});
}

TextPerturbation characters_lost(std::string_view text, Rng& rng, const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  const auto gs = graphemes(in);
  std::vector<Grapheme> cjk, latin, words;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const char32_t c = in[gs[i].start];
    if (unicode::is_han(c)) cjk.push_back(gs[i]);
    if (unicode::is_latin_letter(c)) latin.push_back(gs[i]);
    if (unicode::is_latin_alnum(c) && (i == 0 || !unicode::is_latin_alnum(in[gs[i - 1].start]))) {
      std::size_t j = i;
      while (j + 1 < gs.size() && unicode::is_latin_alnum(in[gs[j + 1].start])) ++j;
      words.push_back({gs[i].start, gs[j].end});
    }
  }
  struct Category {
    const char* name;
    const std::vector<Grapheme>* units;
    int lo, hi;
  };
  // At least one unit of the chosen kind survives, so a category needs two.
  std::vector<Category> present;
  if (cjk.size() > 1) present.push_back({"cjk_characters", &cjk, p.cjk_delete_min, p.cjk_delete_max});
  if (words.size() > 1) present.push_back({"english_words", &words, p.word_delete_min, p.word_delete_max});
  if (latin.size() > 1) present.push_back({"english_characters", &latin, p.latin_char_delete_min, p.latin_char_delete_max});
  if (present.empty()) throw PreconditionError("no eligible characters");
  const Category& cat = present[rng.below(present.size())];
  const auto want = static_cast<std::size_t>(rng.between(cat.lo, cat.hi));
  const auto k = std::min(want, cat.units->size() - 1);
  std::vector<Edit> edits;
  for (std::size_t i : rng.sample_indices(cat.units->size(), k)) {
    edits.push_back({(*cat.units)[i].start, (*cat.units)[i].end, U""});
  }
  return finish("text_characters_lost", in, std::move(edits), rng.seed(),
                {{"category", cat.name}, {"k", std::to_string(k)}});
}

namespace {

struct SwapTable {
  std::map<char32_t, char32_t> to_half;
  std::map<char32_t, char32_t> to_full;
};

const SwapTable& swap_table() {
  static const SwapTable table = [] {
    SwapTable t;
    std::string_view text = resources::get("punct_swap.tsv");
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      if (line.empty() || line.front() == '#') continue;
      std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos) continue;
      std::u32string full = unicode::decode(line.substr(0, tab));
      std::u32string half = unicode::decode(line.substr(tab + 1));
      if (full.size() != 1 || half.size() != 1) continue;
      t.to_half.emplace(full[0], half[0]);
      t.to_full.emplace(half[0], full[0]);
    }
    return t;
  }();
  return table;
}

}  // namespace

TextPerturbation punctuation_error(std::string_view text, Rng& rng) {
  const std::u32string in = unicode::decode(text);
  const auto marks = punctuation_graphemes(in, in.size());
  if (marks.empty()) throw PreconditionError("no punctuation");
  // Matched pairs, found with one stack per bracket kind.
  static const std::vector<std::pair<char32_t, char32_t>> kinds = {
      {U'（', U'）'}, {U'(', U')'}, {U'“', U'”'}, {U'《', U'》'}, {U'「', U'」'},
      {U'『', U'』'}, {U'【', U'】'}, {U'[', U']'}, {U'‘', U'’'}, {U'〈', U'〉'}};
  std::vector<std::pair<Grapheme, Grapheme>> pairs;
  for (const auto& [open, close] : kinds) {
    std::vector<Grapheme> stack;
    for (const auto& g : marks) {
      if (g.end - g.start != 1) continue;
      if (in[g.start] == open) stack.push_back(g);
      if (in[g.start] == close && !stack.empty()) {
        pairs.emplace_back(stack.back(), g);
        stack.pop_back();
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first.start < b.first.start; });
  std::vector<Grapheme> swappable;
  for (const auto& g : marks) {
    if (g.end - g.start == 1 && (swap_table().to_half.count(in[g.start]) || swap_table().to_full.count(in[g.start]))) {
      swappable.push_back(g);
    }
  }
  const std::vector<std::string> rules = {"delete_any", "delete_pair", "swap"};
  auto feasible = [&](const std::string& r) {
    return r == "delete_any" || (r == "delete_pair" && !pairs.empty()) || (r == "swap" && !swappable.empty());
  };
  std::string rule = rules[rng.below(rules.size())];
  if (!feasible(rule)) {
    std::vector<std::string> ok;
    for (const auto& r : rules) {
      if (feasible(r)) ok.push_back(r);
    }
    rule = ok[rng.below(ok.size())];
  }
  std::vector<Edit> edits;
  Params params{{"sub_rule", rule}};
  if (rule == "delete_any") {
    const Grapheme g = marks[rng.below(marks.size())];
    edits.push_back({g.start, g.end, U""});
    params["position"] = std::to_string(g.start);
  } else if (rule == "delete_pair") {
    const auto& pr = pairs[rng.below(pairs.size())];
    edits.push_back({pr.first.start, pr.first.end, U""});
    edits.push_back({pr.second.start, pr.second.end, U""});
    params["positions"] = std::to_string(pr.first.start) + "," + std::to_string(pr.second.start);
  } else {
    const Grapheme g = swappable[rng.below(swappable.size())];
    const char32_t c = in[g.start];
    auto it = swap_table().to_half.find(c);
    const char32_t repl = it != swap_table().to_half.end() ? it->second : swap_table().to_full.at(c);
    edits.push_back({g.start, g.end, std::u32string(1, repl)});
    params["position"] = std::to_string(g.start);
  }
  return finish("text_punctuation_error", in, std::move(edits), rng.seed(), std::move(params));
}

TextPerturbation space_error(std::string_view text, Rng& rng, const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  const std::size_t n = trimmed_length(in);
  if (n == 0) throw PreconditionError("empty text");
  std::vector<std::size_t> spaces;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_space_char(in[i])) spaces.push_back(i);
  }
  std::vector<std::size_t> slots;
  for (std::size_t b : unicode::grapheme_boundaries(in)) {
    if (b < n) slots.push_back(b);
  }
  const bool remove = !spaces.empty() && rng.chance(0.5);
  std::vector<Edit> edits;
  const auto want = static_cast<std::size_t>(rng.between(p.space_edit_min, p.space_edit_max));
  std::vector<std::size_t> at;
  if (remove) {
    for (std::size_t i : rng.sample_indices(spaces.size(), std::min(want, spaces.size()))) {
      edits.push_back({spaces[i], spaces[i] + 1, U""});
      at.push_back(spaces[i]);
    }
  } else {
    for (std::size_t i : rng.sample_indices(slots.size(), std::min(want, slots.size()))) {
      edits.push_back({slots[i], slots[i], U" "});
      at.push_back(slots[i]);
    }
  }
  return finish("extra_missing_spaces", in, std::move(edits), rng.seed(),
                {{"branch", remove ? "delete" : "insert"}, {"k", std::to_string(at.size())}, {"positions", join(at)}});
}

TextPerturbation inline_formula_missed(std::string_view text, Rng& rng) {
  const std::u32string in = unicode::decode(text);
  std::vector<FormulaRegion> inline_regions;
  for (const auto& r : find_formula_regions(in)) {
    if (!r.display) inline_regions.push_back(r);
  }
  if (inline_regions.empty()) throw PreconditionError("no inline formula");
  const auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(inline_regions.size())));
  std::vector<Edit> edits;
  std::vector<std::size_t> removed;
  for (std::size_t i : rng.sample_indices(inline_regions.size(), k)) {
    edits.push_back({inline_regions[i].start, inline_regions[i].end, U""});
    removed.push_back(inline_regions[i].start);
  }
  return finish("inline_formula_missed", in, std::move(edits), rng.seed(),
                {{"k", std::to_string(k)}, {"removed", join(removed)}});
}

TextPerturbation inline_formula_error(std::string_view text, Rng& rng, const TextRuleParams& p) {
  const std::u32string in = unicode::decode(text);
  latex::KernelParams kp;
  kp.min_tokens = p.min_inline_tokens;
  struct Candidate {
    FormulaRegion region;
    latex::TokenStream tokens;
    std::vector<latex::FormulaRule> rules;
  };
  std::vector<Candidate> candidates;
  for (const auto& r : find_formula_regions(in)) {
    if (r.display) continue;
    auto tokens = latex::tokenize(unicode::encode(std::u32string_view(in).substr(r.inner_start, r.inner_end - r.inner_start)));
    if (latex::significant_token_count(tokens) < p.min_inline_tokens) continue;
    auto rules = latex::feasible_rules(tokens, kp);
    if (!rules.empty()) candidates.push_back({r, std::move(tokens), std::move(rules)});
  }
  if (candidates.empty()) throw PreconditionError("no sufficiently long formula");
  const Candidate& c = candidates[rng.below(candidates.size())];
  const latex::FormulaRule rule = c.rules[rng.below(c.rules.size())];
  const auto result = latex::perturb_formula(c.tokens, rule, rng, kp);
  const std::u32string old_inner = in.substr(c.region.inner_start, c.region.inner_end - c.region.inner_start);
  const std::u32string new_inner = unicode::decode(result.latex);
  // Narrow the splice to the changed stretch, keeping grapheme boundaries.
  std::size_t pre = 0;
  while (pre < old_inner.size() && pre < new_inner.size() && old_inner[pre] == new_inner[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < old_inner.size() - pre && suf < new_inner.size() - pre &&
         old_inner[old_inner.size() - 1 - suf] == new_inner[new_inner.size() - 1 - suf]) {
    ++suf;
  }
  const auto bounds = unicode::grapheme_boundaries(in);
  std::size_t start = c.region.inner_start + pre;
  std::size_t end = c.region.inner_end - suf;
  while (!std::binary_search(bounds.begin(), bounds.end(), start)) --start, --pre;
  while (!std::binary_search(bounds.begin(), bounds.end(), end)) ++end, --suf;
  Params params = result.details;
  params["rule"] = std::string(latex::to_string(rule));
  params["formula_start"] = std::to_string(c.region.start);
  return finish("inline_formula_recognition_error", in,
                {{start, end, new_inner.substr(pre, new_inner.size() - pre - suf)}}, rng.seed(), std::move(params));
}

const std::vector<std::string>& rule_based_types() {
  static const std::vector<std::string> ids = {
      "text_misrecognized_as_title", "text_paragraph_format_error", "list_format_error",
      "title_format_error",          "superscript_citation_format_error", "text_repetition",
      "text_redundancy",             "text_segment_lost",           "text_characters_lost",
      "text_punctuation_error",      "extra_missing_spaces",        "inline_formula_missed",
      "inline_formula_recognition_error"};
  return ids;
}

bool is_rule_based(std::string_view error_type) {
  const auto& ids = rule_based_types();
  return std::find(ids.begin(), ids.end(), error_type) != ids.end();
}

TextPerturbation apply_rule(std::string_view type, std::string_view text, Rng& rng, const TextContext& ctx) {
  const auto& p = ctx.params;
  if (type == "text_misrecognized_as_title") return misrecognize_as_title(text, rng, p);
  if (type == "text_paragraph_format_error") return paragraph_format_error(text, rng, p);
  if (type == "list_format_error") return list_format_error(text, rng, p);
  if (type == "title_format_error") return title_format_error(text);
  if (type == "superscript_citation_format_error") return superscript_citation_error(text);
  if (type == "text_repetition") return text_repetition(text, rng, p);
  if (type == "text_redundancy") return text_redundancy(text, ctx.donor_pool, rng, p);
  if (type == "text_segment_lost") return text_segment_lost(text, rng);
  if (type == "text_characters_lost") return characters_lost(text, rng, p);
  if (type == "text_punctuation_error") return punctuation_error(text, rng);
  if (type == "extra_missing_spaces") return space_error(text, rng, p);
  if (type == "inline_formula_missed") return inline_formula_missed(text, rng);
  if (type == "inline_formula_recognition_error") return inline_formula_error(text, rng, p);
  throw ValidationError("no rule-based text injector for '" + std::string(type) + "'");
}

}  // namespace docinspect::text
