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

#include "sim_llm.hpp"

#include <algorithm>

#include "docinspect/corpus.hpp"
#include "docinspect/error.hpp"
#include "docinspect/latex.hpp"
#include "docinspect/rng.hpp"
#include "docinspect/synth_llm.hpp"
#include "docinspect/table.hpp"
#include "docinspect/taxonomy.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::fixtures {

namespace {

const std::string kMarkA = "\x01SIM_A\x01";
const std::string kMarkB = "\x01SIM_B\x01";

std::vector<std::string> split_on(const std::string& s, const std::vector<std::string>& marks) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& m : marks) {
    const std::size_t at = s.find(m, pos);
    if (at == std::string::npos || s.find(m, at + m.size()) != std::string::npos) {
      throw std::logic_error("prompt template must hold each value exactly once");
    }
    out.push_back(s.substr(pos, at - pos));
    pos = at + m.size();
  }
  out.push_back(s.substr(pos));
  return out;
}

// Values between the pieces, or nullopt when `text` does not fit them.
std::optional<std::vector<std::string>> match(const std::string& text, const std::vector<std::string>& pieces) {
  if (text.rfind(pieces.front(), 0) != 0) return std::nullopt;
  const std::string& last = pieces.back();
  if (text.size() < pieces.front().size() + last.size() ||
      text.compare(text.size() - last.size(), last.size(), last) != 0) {
    return std::nullopt;
  }
  std::vector<std::string> values;
  std::size_t pos = pieces.front().size();
  const std::size_t end = text.size() - last.size();
  for (std::size_t i = 1; i + 1 < pieces.size(); ++i) {
    const std::size_t at = text.find(pieces[i], pos);
    if (at == std::string::npos || at > end) return std::nullopt;
    values.push_back(text.substr(pos, at - pos));
    pos = at + pieces[i].size();
  }
  if (pos > end) return std::nullopt;
  values.push_back(text.substr(pos, end - pos));
  return values;
}

std::string marker_for(const std::string& type) {
  const ErrorType& t = Taxonomy::builtin().at(type);
  if (type == "inline_formula_style_error" || t.element == ElementKind::Equation) return "Final formula: ";
  if (t.element == ElementKind::Table) return "Final Table: ";
  return "Final Text: ";
}

std::u32string confuse_chars(const std::u32string& in, Rng& rng, int max_edits) {
  static const std::map<char32_t, char32_t> latin = {
      {U'o', U'0'}, {U'O', U'0'}, {U'l', U'1'}, {U'I', U'l'}, {U'e', U'c'}, {U'S', U'5'}, {U'B', U'8'},
      {U'a', U'o'}, {U'u', U'v'}, {U'n', U'h'}, {U'0', U'8'}, {U'1', U'7'}, {U'5', U'6'}, {U'2', U'Z'},
      {U'3', U'8'}, {U'4', U'A'}, {U'6', U'b'}, {U'7', U'1'}, {U'8', U'3'}, {U'9', U'g'}};
  static const std::map<char32_t, char32_t> han = {{U'未', U'末'}, {U'己', U'已'}, {U'人', U'入'}, {U'大', U'太'},
                                                   {U'日', U'曰'}, {U'土', U'士'}, {U'天', U'夫'}, {U'方', U'万'},
                                                   {U'本', U'木'}, {U'提', U'题'}, {U'型', U'形'}, {U'据', U'剧'},
                                                   {U'析', U'折'}, {U'评', U'平'}, {U'统', U'充'}, {U'验', U'险'}};
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (latin.count(in[i]) || han.count(in[i])) eligible.push_back(i);
  }
  std::u32string out = in;
  if (eligible.empty()) return out;
  const auto k = std::min<std::size_t>(eligible.size(), static_cast<std::size_t>(rng.between(1, max_edits)));
  for (std::size_t idx : rng.sample_indices(eligible.size(), k)) {
    const std::size_t i = eligible[idx];
    auto it = latin.find(out[i]);
    out[i] = it != latin.end() ? it->second : han.at(out[i]);
  }
  return out;
}

std::string to_unicode_math(const std::string& latex_src) {
  static const std::vector<std::pair<std::string, std::string>> commands = {
      {"\\alpha", "α"}, {"\\beta", "β"},  {"\\gamma", "γ"},  {"\\delta", "δ"},   {"\\eta", "η"},
      {"\\theta", "θ"}, {"\\lambda", "λ"}, {"\\mu", "μ"},     {"\\pi", "π"},      {"\\sigma", "σ"},
      {"\\omega", "ω"}, {"\\leq", "≤"},   {"\\geq", "≥"},    {"\\times", "×"},   {"\\cdot", "·"},
      {"\\infty", "∞"}, {"\\sum", "∑"},   {"\\int", "∫"},    {"\\pm", "±"},      {"\\partial", "∂"},
      {"\\nabla", "∇"}, {"\\sqrt", "√"},  {"\\left", ""},    {"\\right", ""},    {"\\frac", ""},
      {"\\mathbf", ""}, {"\\hat", ""},    {"^{2}", "²"},     {"^{n}", "ⁿ"},      {"_{1}", "₁"},
      {"_{i}", "ᵢ"},    {"_{j}", "ⱼ"},    {"_{k}", "ₖ"},     {"\\(", ""},        {"\\)", ""}};
  std::string s = latex_src;
  for (const auto& [from, to] : commands) {
    for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size())) {
      s.replace(at, from.size(), to);
    }
  }
  std::string out;
  for (char c : s) {
    if (c != '{' && c != '}' && c != '$' && c != '\\') out += c;
  }
  return unicode::trim(out);
}

std::string table_answer(const std::string& type, const std::string& input, Rng& rng) {
  table::TableGrid g = table::parse_table(input);
  const auto occ = table::occupancy(g);
  if (type == "partial_table_redundancy") {
    std::vector<table::Cell> row;
    for (std::size_t c = 0; c < occ.n_cols; ++c) row.push_back({c == 0 ? "Note" : std::to_string(rng.between(1, 99)), 1, 1, false});
    const std::size_t at = 1 + rng.below(g.rows.size());
    // Only insert between rows that no rowspan crosses.
    bool crossed = false;
    for (const auto& p : occ.placements) crossed |= p.row < at && p.row + p.rowspan > at;
    g.rows.insert(g.rows.begin() + static_cast<std::ptrdiff_t>(crossed ? g.rows.size() : at), std::move(row));
  } else if (type == "table_merged_cell_error") {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      for (std::size_t c = 0; c + 1 < g.rows[r].size(); ++c) {
        const auto& a = g.rows[r][c];
        const auto& b = g.rows[r][c + 1];
        if (a.rowspan == 1 && b.rowspan == 1) pairs.emplace_back(r, c);
      }
    }
    if (!pairs.empty()) {
      const auto [r, c] = pairs[rng.below(pairs.size())];
      auto& row = g.rows[r];
      row[c].colspan += row[c + 1].colspan;
      row[c].text += (row[c].text.empty() || row[c + 1].text.empty() ? "" : " ") + row[c + 1].text;
      row.erase(row.begin() + static_cast<std::ptrdiff_t>(c + 1));
    }
  } else if (type == "table_cell_content_error") {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      for (std::size_t c = 0; c < g.rows[r].size(); ++c) {
        if (!g.rows[r][c].text.empty()) cells.emplace_back(r, c);
      }
    }
    rng.shuffle(cells);
    for (const auto& [r, c] : cells) {
      const auto changed = confuse_chars(unicode::decode(g.rows[r][c].text), rng, 2);
      if (unicode::encode(changed) != g.rows[r][c].text) {
        g.rows[r][c].text = unicode::encode(changed);
        break;
      }
    }
  }
  return table::serialize_table(g);
}

std::string equation_answer(const std::string& type, const std::string& input, Rng& rng) {
  if (type == "displayed_formula_as_text") return to_unicode_math(input);
  latex::FormulaRule rule = latex::FormulaRule::Character;
  if (type == "displayed_formula_syntax_error") rule = latex::FormulaRule::Syntax;
  else if (type == "partial_displayed_formula_missing") rule = latex::FormulaRule::PartialOmission;
  else if (type == "displayed_formula_structure_error") rule = latex::FormulaRule::Structure;
  try {
    return latex::perturb_formula(latex::tokenize(input), rule, rng).latex;
  } catch (const PreconditionError&) {
    return input;  // the caller's soundness gate rejects this
  }
}

}  // namespace

client::ClientProfile replay_profile() {
  client::ClientProfile p;
  p.name = "replay";
  p.model = "replay";
  return p;
}

std::string SimulatedLlm::synthesize(const std::string& type, const std::string& input, std::uint64_t seed) {
  Rng rng(seed);
  std::string payload;
  if (type == "text_misrecognized_as_table") {
    std::vector<std::string> words;
    std::string w;
    for (char c : input + " ") {
      if (c == ' ' || c == '\n') {
        if (!w.empty()) words.push_back(w);
        w.clear();
      } else {
        w += c;
      }
    }
    payload = "<table>";
    for (std::size_t i = 0; i < words.size(); i += 3) {
      payload += "<tr>";
      for (std::size_t j = i; j < std::min(words.size(), i + 3); ++j) payload += "<td>" + words[j] + "</td>";
      payload += "</tr>";
    }
    payload += "</table>";
  } else if (type == "text_misrecognized_as_formula") {
    payload = "$" + unicode::trim(input) + "$";
  } else if (type == "text_character_recognition_error") {
    payload = unicode::encode(confuse_chars(unicode::decode(input), rng, 3));
  } else if (type == "inline_formula_style_error") {
    payload = to_unicode_math(input);
  } else {
    const ErrorType& t = Taxonomy::builtin().at(type);
    payload = t.element == ElementKind::Table ? table_answer(type, input, rng) : equation_answer(type, input, rng);
  }
  return "Modification Details:\n1. simulated edit\n" + marker_for(type) + payload;
}

SimulatedLlm::SimulatedLlm(client::ClientProfile profile) : profile_(std::move(profile)) {
  for (const ErrorType& t : Taxonomy::builtin().types()) {
    if (t.synthesis_mode == SynthesisMode::LlmGuided) {
      patterns_.push_back({Pattern::Synth, t.id, {}, split_on(synth::render_prompt(t.id, kMarkA), {kMarkA})});
    }
  }
  patterns_.push_back({Pattern::Filter, "table_recognition_corruption", {},
                       split_on(synth::render_prompt("table_recognition_corruption", kMarkA, kMarkB), {kMarkA, kMarkB})});
  for (ElementKind e : kAllElements) {
    patterns_.push_back({Pattern::Judge, "", cocl::PromptPreset::Cocl,
                         split_on(cocl::render_judge_prompt(e, kMarkA, cocl::PromptPreset::Cocl), {kMarkA})});
  }
  for (auto preset : {cocl::PromptPreset::Cot, cocl::PromptPreset::NoCot}) {
    patterns_.push_back({Pattern::Judge, "", preset,
                         split_on(cocl::render_judge_prompt(ElementKind::Text, kMarkA, preset), {kMarkA})});
  }
}

std::string SimulatedLlm::judge(const std::string& prediction, cocl::PromptPreset preset) const {
  std::set<std::string> detected;
  if (oracle_) {
    if (auto gold = oracle_(prediction)) detected = *gold;
  }
  const std::uint64_t h = fnv1a64(prediction);
  if (noise_) {
    if (detected.size() > 1 && h % 5 == 0) detected.erase(detected.begin());
    if (h % 7 == 0) {
      const auto& types = Taxonomy::builtin().types();
      detected.insert(types[(h / 7) % types.size()].id);
    }
  }
  const auto verdict = detected.empty() ? cocl::Verdict::Good : cocl::Verdict::Bad;
  std::optional<std::string> think;
  if (preset != cocl::PromptPreset::NoCot) {
    think = detected.empty() ? "The output matches the image content." : "The output deviates from the image.";
  }
  return cocl::render_output(verdict, detected, think);
}

client::ChatResponse SimulatedLlm::complete(const client::ChatRequest& request) {
  ++calls_;
  const std::uint64_t seed = request.seed.value_or(fnv1a64(request.user));
  for (const auto& p : patterns_) {
    auto values = match(request.user, p.pieces);
    if (!values) continue;
    client::ChatResponse r;
    r.finish_reason = "stop";
    if (p.kind == Pattern::Synth) {
      r.text = synthesize(p.error_type, (*values)[0], seed);
    } else if (p.kind == Pattern::Filter) {
      const std::string& gt = (*values)[0];
      const std::string& candidate = (*values)[1];
      std::string verdict = "Unable to judge";
      try {
        const auto a = table::occupancy(table::parse_table(gt));
        const auto b = table::occupancy(table::parse_table(candidate));
        const double ca = static_cast<double>(a.n_rows * a.n_cols), cb = static_cast<double>(b.n_rows * b.n_cols);
        if (canonical_equal(ElementKind::Table, gt, candidate)) verdict = "Good Table";
        else if (std::abs(ca - cb) >= 0.2 * ca) verdict = "Bad Table";
      } catch (const ValidationError&) {
        verdict = "Bad Table";
      }
      r.text = "[Reason] compared with the ground truth\n[Result] " + verdict;
    } else {
      r.text = judge((*values)[0], p.preset);
    }
    r.prompt_tokens = static_cast<long>(request.user.size() / 4);
    r.completion_tokens = static_cast<long>(r.text.size() / 4);
    return r;
  }
  throw ClientError(ClientErrorKind::Malformed, "simulated model: unrecognized prompt");
}

}  // namespace docinspect::fixtures
