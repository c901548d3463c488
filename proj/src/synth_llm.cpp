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

#include "docinspect/synth_llm.hpp"

#include <algorithm>
#include <map>

#include "docinspect/latex.hpp"
#include "docinspect/perturb_text.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/table.hpp"
#include "docinspect/taxonomy.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::synth {

namespace {

// Single pass: replaced text is never scanned again.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const std::size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

const std::vector<std::string>& placeholder_names() {
  static const std::vector<std::string> names = {"detailed_task_description", "specific_task_instructions",
                                                 "output_formats", "example_list", "input", "candidate"};
  return names;
}

std::string chomp(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string lower(std::string_view s) { return unicode::ascii_lower(s); }

bool is_inline_style(std::string_view type) { return type == "inline_formula_style_error"; }

}  // namespace

std::string render_prompt(std::string_view error_type, std::string_view input, std::string_view candidate) {
  const ErrorType& type = Taxonomy::builtin().at(error_type);
  if (type.synthesis_mode == SynthesisMode::RuleBased) {
    throw ValidationError("'" + type.id + "' is rule-based and has no prompt template");
  }
  if (unicode::trim(input).empty()) throw ValidationError("empty input for prompt '" + type.id + "'");
  const std::string path = "prompts/" + type.id + ".txt";
  if (!resources::contains(path)) throw ValidationError("missing prompt template '" + path + "'");
  auto sections = resources::sections(resources::get(path));
  auto frame_it = sections.find("frame");
  if (frame_it == sections.end()) throw ValidationError("prompt template '" + path + "' names no frame");
  std::string body;
  if (unicode::trim(frame_it->second) == "none") {
    auto t = sections.find("template");
    if (t == sections.end()) throw ValidationError("prompt template '" + path + "' has no template section");
    body = t->second;
  } else {
    const std::string frame_path = "prompts/frame_" + unicode::trim(frame_it->second) + ".txt";
    if (!resources::contains(frame_path)) throw ValidationError("missing prompt frame '" + frame_path + "'");
    std::map<std::string, std::string> values;
    for (const char* key : {"detailed_task_description", "specific_task_instructions", "output_formats", "example_list"}) {
      auto it = sections.find(key);
      values[key] = it == sections.end() ? "" : chomp(it->second);
    }
    body = substitute(chomp(std::string(resources::get(frame_path))), values);
  }
  if (body.find("{candidate}") != std::string::npos && candidate.empty()) {
    throw ValidationError("prompt '" + type.id + "' needs a candidate output");
  }
  std::string out = substitute(chomp(body), {{"input", std::string(input)}, {"candidate", std::string(candidate)}});
  // Any placeholder that survived was not present in the substitution map.
  const std::string check = substitute(chomp(body), {});
  for (const auto& name : placeholder_names()) {
    if (name == "input" || name == "candidate") continue;
    if (check.find("{" + name + "}") != std::string::npos) {
      throw ValidationError("unresolved placeholder {" + name + "} in prompt '" + type.id + "'");
    }
  }
  return out;
}

std::string render_prompt(std::string_view error_type, const ElementRecord& record) {
  return render_prompt(error_type, record.ground_truth);
}

namespace {

std::string strip_fences(std::string s) {
  s = unicode::trim(s);
  if (s.rfind("```", 0) == 0) {
    const std::size_t nl = s.find('\n');
    s = nl == std::string::npos ? "" : s.substr(nl + 1);
    const std::size_t end = s.rfind("```");
    if (end != std::string::npos) s = s.substr(0, end);
    s = unicode::trim(s);
  }
  return s;
}

}  // namespace

SynthesisResponse parse_response(std::string_view error_type, std::string_view raw,
                                 std::optional<std::string_view> original) {
  const ErrorType& type = Taxonomy::builtin().at(error_type);
  SynthesisResponse r;
  r.raw = std::string(raw);
  const std::string low = lower(raw);
  std::string marker;
  if (is_inline_style(type.id) || type.element == ElementKind::Equation) marker = "final formula";
  else if (type.element == ElementKind::Table) marker = "final table";
  else marker = "final text";
  const std::size_t at = low.rfind(marker);
  if (at == std::string::npos) throw UnparseableResponse("unparseable response: no '" + marker + ":' block");
  std::size_t colon = at + marker.size();
  while (colon < raw.size() && raw[colon] == ' ') ++colon;
  if (colon >= raw.size() || raw[colon] != ':') throw UnparseableResponse("unparseable response: no '" + marker + ":' block");
  r.final_payload = strip_fences(std::string(raw.substr(colon + 1)));
  if (r.final_payload.empty()) throw UnparseableResponse("unparseable response: empty final block");
  const std::size_t details = low.find("modification details");
  if (details != std::string::npos && details < at) {
    std::size_t start = low.find(':', details);
    if (start != std::string::npos && start < at) r.modification_details = unicode::trim(raw.substr(start + 1, at - start - 1));
  }

  if (type.element == ElementKind::Equation) {
    const bool balanced = latex::validate_balanced(r.final_payload);
    if (type.id == "displayed_formula_syntax_error" && balanced) {
      throw UnsoundResponse("label-unsound response: syntax-error formula is still balanced");
    }
    if (type.id != "displayed_formula_syntax_error" && type.id != "displayed_formula_as_text" && !balanced) {
      throw UnsoundResponse("label-unsound response: formula is not balanced");
    }
  }
  if (type.element == ElementKind::Table && type.id != "table_recognition_corruption") {
    try {
      table::parse_table(r.final_payload);
    } catch (const ValidationError& e) {
      throw UnsoundResponse(std::string("label-unsound response: table does not parse: ") + e.what());
    }
  }
  if (original) {
    const ElementKind kind = is_inline_style(type.id) ? ElementKind::Equation : type.element;
    if (canonical_equal(kind, *original, r.final_payload)) {
      throw UnsoundResponse("label-unsound response: output equals the input");
    }
  }
  return r;
}

std::string_view to_string(FilterVerdict v) {
  switch (v) {
    case FilterVerdict::BadTable:
      return "Bad Table";
    case FilterVerdict::GoodTable:
      return "Good Table";
    case FilterVerdict::UnableToJudge:
      return "Unable to judge";
  }
  return "unknown";
}

FilterVerdict parse_filter_verdict(std::string_view raw) {
  const std::string low = lower(raw);
  const std::size_t at = low.rfind("[result]");
  if (at == std::string::npos) throw UnparseableResponse("unparseable filter response: no [Result]");
  std::string rest = unicode::trim(low.substr(at + 8));
  if (rest.rfind("bad table", 0) == 0) return FilterVerdict::BadTable;
  if (rest.rfind("good table", 0) == 0) return FilterVerdict::GoodTable;
  if (rest.rfind("unable to judge", 0) == 0) return FilterVerdict::UnableToJudge;
  throw UnparseableResponse("unparseable filter response: unknown result '" + rest.substr(0, 40) + "'");
}

std::vector<FilterOutcome> filter_corruption(const ElementRecord& record, const std::vector<std::string>& candidates,
                                             client::ModelClient& client) {
  std::vector<FilterOutcome> out;
  for (const auto& candidate : candidates) {
    FilterOutcome o{candidate, std::nullopt, false, ""};
    if (canonical_equal(ElementKind::Table, record.ground_truth, candidate)) {
      o.verdict = FilterVerdict::GoodTable;
      o.reason = "identical to the ground truth";
      out.push_back(std::move(o));
      continue;
    }
    try {
      client::ChatRequest req;
      req.user = render_prompt("table_recognition_corruption", record.ground_truth, candidate);
      o.verdict = parse_filter_verdict(client.complete(req).text);
      o.selected = *o.verdict == FilterVerdict::BadTable;
      o.reason = std::string(to_string(*o.verdict));
    } catch (const Error& e) {
      o.reason = std::string("skipped: ") + e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

Splice diff_splice(std::u32string_view before, std::u32string_view after) {
  std::size_t pre = 0;
  while (pre < before.size() && pre < after.size() && before[pre] == after[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < before.size() - pre && suf < after.size() - pre &&
         before[before.size() - 1 - suf] == after[after.size() - 1 - suf]) {
    ++suf;
  }
  const auto bounds = unicode::grapheme_boundaries(before);
  while (pre > 0 && !std::binary_search(bounds.begin(), bounds.end(), pre)) --pre;
  while (suf > 0 && !std::binary_search(bounds.begin(), bounds.end(), before.size() - suf)) --suf;
  return {pre, before.size() - suf, unicode::encode(after.substr(pre, after.size() - pre - suf))};
}

LlmPerturbation LlmInjector::apply(std::string_view error_type, std::string_view input, std::uint64_t seed) {
  const ErrorType& type = Taxonomy::builtin().at(error_type);
  if (type.synthesis_mode != SynthesisMode::LlmGuided) {
    throw ValidationError("'" + type.id + "' is not an LLM-guided type");
  }
  if (unicode::trim(input).empty()) throw PreconditionError("nothing to rewrite in an empty input");
  const std::u32string in = unicode::decode(input);
  // The inline style type rewrites one formula of the text, the others the
  // whole element.
  std::size_t region_start = 0, region_end = in.size();
  if (is_inline_style(type.id)) {
    std::vector<text::FormulaRegion> inline_regions;
    for (const auto& r : text::find_formula_regions(in)) {
      if (!r.display) inline_regions.push_back(r);
    }
    if (inline_regions.empty()) throw PreconditionError("no inline formula");
    Rng pick(seed);
    const auto& r = inline_regions[pick.below(inline_regions.size())];
    region_start = r.start;
    region_end = r.end;
  }
  const std::string region = unicode::encode(std::u32string_view(in).substr(region_start, region_end - region_start));
  std::string last_reason;
  for (int attempt = 0; attempt < max_attempts_; ++attempt) {
    client::ChatRequest req;
    req.user = render_prompt(type.id, region);
    req.seed = attempt_seed(seed, attempt);
    try {
      const auto response = parse_response(type.id, client_.complete(req).text, region);
      std::u32string out_text = in.substr(0, region_start) + unicode::decode(response.final_payload) + in.substr(region_end);
      const std::string output = unicode::encode(out_text);
      const ElementKind kind = type.element;
      if (canonical_equal(kind, input, output)) throw UnsoundResponse("label-unsound response: output equals the input");
      LlmPerturbation p;
      p.output = output;
      p.receipt.error_type = type.id;
      p.receipt.rng_seed = *req.seed;
      p.receipt.parameters["attempts"] = std::to_string(attempt + 1);
      if (response.modification_details) p.receipt.parameters["modification_details"] = *response.modification_details;
      if (kind == ElementKind::Table) {
        p.receipt.parameters["output_html"] = output;
      } else {
        Splice s = diff_splice(in, out_text);
        const std::size_t repl_len = unicode::length(s.replacement);
        p.receipt.spans_touched.push_back({s.start, s.start + repl_len});
        p.receipt.edits.push_back(std::move(s));
      }
      return p;
    } catch (const UnparseableResponse& e) {
      last_reason = e.what();
    } catch (const UnsoundResponse& e) {
      last_reason = e.what();
    } catch (const ClientError& e) {
      last_reason = e.what();
    }
  }
  throw PreconditionError("LLM synthesis of '" + type.id + "' failed after " + std::to_string(max_attempts_) +
                          " attempts: " + last_reason);
}

}  // namespace docinspect::synth
