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

#include "docinspect/cocl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "docinspect/error.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::cocl {

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

ChecklistTemplate parse_checklist(ElementKind element, std::string_view text, const Taxonomy& taxonomy) {
  ChecklistTemplate t{element, {}};
  const auto sections = resources::sections(text);
  for (const auto& level : taxonomy.levels(element)) {
    auto it = sections.find(level.id);
    if (it == sections.end()) throw ValidationError("checklist has no item for level '" + level.id + "'");
    ChecklistItem item{level.id, level.name, unicode::trim(it->second), {}};
    for (const ErrorType* type : taxonomy.types_of(element)) {
      if (type->level == level.id) item.candidate_error_types.push_back(type->id);
    }
    t.items.push_back(std::move(item));
  }
  for (const auto& [name, body] : sections) {
    if (std::none_of(t.items.begin(), t.items.end(), [&](const ChecklistItem& i) { return i.check_id == name; })) {
      throw ValidationError("checklist item '" + name + "' names no level of " + std::string(to_string(element)));
    }
  }
  if (t.items.empty()) throw ValidationError("empty checklist");
  return t;
}

ChecklistTemplate checklist_template(ElementKind element, const Taxonomy& taxonomy) {
  return parse_checklist(element, resources::get("checklists/" + std::string(to_string(element)) + ".txt"), taxonomy);
}

std::string render_checklist(ElementKind element, std::string_view parsed_output, const Taxonomy& taxonomy) {
  const ChecklistTemplate t = checklist_template(element, taxonomy);
  std::ostringstream out;
  out << "Analyze the quality of OCR results for the given image.\n";
  out << "<ocr_content>\n" << parsed_output << "\n</ocr_content>\n\n";
  out << "The content is a " << to_string(element) << " element. Work through this checklist in order:\n";
  int n = 1;
  for (const auto& item : t.items) {
    out << n++ << ". " << item.level_name << ": " << item.prompt_text << "\n   Candidate errors:";
    for (const auto& id : item.candidate_error_types) {
      const ErrorType& type = taxonomy.at(id);
      out << "\n   - " << type.display_name << ": " << type.definition;
    }
    out << "\n";
  }
  out << "\nInside <think>, write one line per checklist item as \"<level>: no error\" or "
         "\"<level>: <error names>\". Then give <answer>Goodcase.</answer> or <answer>Badcase.</answer>, "
         "and for a Badcase list every error as <error_type>name</error_type>.";
  return out.str();
}

std::string_view to_string(PromptPreset preset) {
  switch (preset) {
    case PromptPreset::Cocl:
      return "cocl";
    case PromptPreset::Cot:
      return "cot";
    case PromptPreset::NoCot:
      return "nocot";
  }
  return "unknown";
}

PromptPreset parse_prompt_preset(std::string_view name) {
  const std::string n = unicode::ascii_lower(name);
  if (n == "cocl") return PromptPreset::Cocl;
  if (n == "cot") return PromptPreset::Cot;
  if (n == "nocot" || n == "no-cot") return PromptPreset::NoCot;
  throw ValidationError("unknown prompt preset '" + std::string(name) + "'");
}

std::string render_judge_prompt(ElementKind element, std::string_view parsed_output, PromptPreset preset,
                                const Taxonomy& taxonomy) {
  if (preset == PromptPreset::Cocl) return render_checklist(element, parsed_output, taxonomy);
  std::string definitions;
  for (ElementKind kind : kAllElements) {
    definitions += std::string(1, static_cast<char>(std::toupper(to_string(kind)[0]))) +
                   std::string(to_string(kind).substr(1)) + " errors:\n";
    for (const ErrorType* t : taxonomy.types_of(kind)) {
      definitions += "- " + t->display_name + ": " + t->definition + "\n";
    }
  }
  while (!definitions.empty() && definitions.back() == '\n') definitions.pop_back();
  std::string prompt(resources::get("prompts/judge_frame.txt"));
  std::string format(resources::get(preset == PromptPreset::Cot ? "prompts/judge_format_cot.txt"
                                                                : "prompts/judge_format_nocot.txt"));
  while (!format.empty() && format.back() == '\n') format.pop_back();
  while (!prompt.empty() && prompt.back() == '\n') prompt.pop_back();
  replace_all(prompt, "{error_definition_list}", definitions);
  replace_all(prompt, "{output_format}", format);
  replace_all(prompt, "{parsed_output}", parsed_output);
  return prompt;
}

std::string_view to_string(Verdict v) { return v == Verdict::Good ? "good" : "bad"; }

namespace {

struct TagScan {
  std::vector<std::string> bodies;
  bool well_formed = true;
};

// Collects <tag>...</tag> bodies; unmatched open or close tags mark the scan
// as malformed.
TagScan scan_tags(std::string_view raw, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  TagScan scan;
  std::size_t pos = 0;
  while (true) {
    const std::size_t o = raw.find(open, pos);
    const std::size_t stray = raw.find(close, pos);
    if (o == std::string_view::npos) {
      if (stray != std::string_view::npos) scan.well_formed = false;
      break;
    }
    if (stray != std::string_view::npos && stray < o) scan.well_formed = false;
    const std::size_t c = raw.find(close, o + open.size());
    if (c == std::string_view::npos) {
      scan.well_formed = false;
      break;
    }
    const std::string_view body = raw.substr(o + open.size(), c - o - open.size());
    if (body.find(open) != std::string_view::npos) scan.well_formed = false;
    scan.bodies.emplace_back(body);
    pos = c + close.size();
  }
  return scan;
}

std::string normalize_name(std::string_view s) {
  std::string t = unicode::trim(s);
  while (!t.empty() && (t.back() == '.' || t.back() == ';')) t.pop_back();
  std::string out;
  bool space = false;
  for (char c : t) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

const ErrorType* match_type(std::string_view name, const Taxonomy& taxonomy) {
  const std::string n = normalize_name(name);
  if (const ErrorType* t = taxonomy.find_by_name(n)) return t;
  std::string underscored = n;
  std::replace(underscored.begin(), underscored.end(), ' ', '_');
  return taxonomy.find_by_name(underscored);
}

std::optional<std::map<std::string, std::string>> findings(std::string_view think, const Taxonomy& taxonomy) {
  std::map<std::string, std::string> out;
  std::istringstream lines{std::string(think)};
  std::string line;
  while (std::getline(lines, line)) {
    std::string l = unicode::trim(line);
    while (!l.empty() && (l[0] == '-' || l[0] == '*' || std::isdigit(static_cast<unsigned char>(l[0])) || l[0] == '.' ||
                          l[0] == ' ')) {
      l.erase(0, 1);
    }
    const std::size_t colon = l.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = unicode::ascii_lower(unicode::trim(l.substr(0, colon)));
    for (const auto& level : taxonomy.levels()) {
      if (unicode::ascii_lower(level.name) == key || level.id == key) {
        out[level.id] = unicode::trim(l.substr(colon + 1));
      }
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

}  // namespace

JudgeOutput parse_judge_output(std::string_view raw, const Taxonomy& taxonomy) {
  JudgeOutput out;
  out.raw = std::string(raw);
  bool ok = true;

  const TagScan think = scan_tags(raw, "think");
  if (!think.well_formed || think.bodies.size() > 1) ok = false;
  if (!think.bodies.empty()) {
    out.think_text = unicode::trim(think.bodies.front());
    out.checklist_findings = findings(*out.think_text, taxonomy);
  }

  const TagScan answer = scan_tags(raw, "answer");
  std::optional<Verdict> stated;
  if (!answer.well_formed || answer.bodies.size() != 1) ok = false;
  if (!answer.bodies.empty()) {
    std::string a = unicode::ascii_lower(normalize_name(answer.bodies.front()));
    a.erase(std::remove(a.begin(), a.end(), ' '), a.end());
    if (a == "goodcase") stated = Verdict::Good;
    else if (a == "badcase") stated = Verdict::Bad;
  }
  if (!stated) ok = false;

  const TagScan types = scan_tags(raw, "error_type");
  if (!types.well_formed) ok = false;
  for (const auto& body : types.bodies) {
    if (const ErrorType* t = match_type(body, taxonomy)) {
      out.detected.insert(t->id);
      continue;
    }
    // Several names in one tag.
    bool any = false;
    std::istringstream parts(body);
    std::vector<std::string> pieces;
    for (std::string piece; std::getline(parts, piece, ',');) pieces.push_back(piece);
    if (pieces.size() > 1) {
      for (const auto& piece : pieces) {
        if (const ErrorType* t = match_type(piece, taxonomy)) {
          out.detected.insert(t->id);
          any = true;
        } else if (!normalize_name(piece).empty()) {
          out.unknown_types.push_back(normalize_name(piece));
        }
      }
    }
    if (!any && pieces.size() <= 1 && !normalize_name(body).empty()) out.unknown_types.push_back(normalize_name(body));
  }

  if (stated == Verdict::Good && (!out.detected.empty() || !out.unknown_types.empty())) {
    ok = false;
    out.verdict = Verdict::Bad;
  } else {
    out.verdict = stated.value_or(Verdict::Bad);
  }
  if (!stated) {
    out.detected.clear();
    out.unknown_types.clear();
  }
  out.format_ok = ok;
  return out;
}

std::string render_output(Verdict verdict, const std::set<std::string>& detected, const std::optional<std::string>& think,
                          const Taxonomy& taxonomy) {
  std::string out;
  if (think) out += "<think>" + *think + "</think>\n";
  out += verdict == Verdict::Good ? "<answer>Goodcase.</answer>" : "<answer>Badcase.</answer>";
  if (verdict == Verdict::Bad && !detected.empty()) {
    out += "\n";
    for (const ErrorType& t : taxonomy.types()) {
      if (detected.count(t.id)) out += "<error_type>" + t.display_name + "</error_type>";
    }
  }
  return out;
}

OrderedJson to_json(const JudgeRecord& r) {
  OrderedJson j;
  j["case_id"] = r.case_id;
  j["sample_index"] = r.sample_index;
  j["raw"] = r.output.raw;
  j["verdict"] = std::string(to_string(r.output.verdict));
  j["detected"] = r.output.detected;
  j["format_ok"] = r.output.format_ok;
  j["unknown_types"] = r.output.unknown_types;
  return j;
}

JudgeRecord judge_record_from_json(const Json& j, const Taxonomy& taxonomy) {
  JudgeRecord r;
  r.case_id = j.at("case_id").get<std::string>();
  r.sample_index = j.value("sample_index", 0);
  const std::string raw = j.value("raw", "");
  if (!j.contains("verdict")) {
    r.output = parse_judge_output(raw, taxonomy);
    return r;
  }
  r.output.raw = raw;
  const std::string v = unicode::ascii_lower(j.at("verdict").get<std::string>());
  if (v != "good" && v != "bad") throw ValidationError("verdict must be 'good' or 'bad'");
  r.output.verdict = v == "good" ? Verdict::Good : Verdict::Bad;
  for (const auto& d : j.value("detected", Json::array())) r.output.detected.insert(taxonomy.at(d.get<std::string>()).id);
  r.output.format_ok = j.value("format_ok", true);
  for (const auto& u : j.value("unknown_types", Json::array())) r.output.unknown_types.push_back(u.get<std::string>());
  if (r.output.verdict == Verdict::Good && !r.output.detected.empty()) {
    throw ValidationError("a good verdict cannot list detected errors");
  }
  return r;
}

std::vector<JudgeRecord> read_judge_records(std::istream& in, const Taxonomy& taxonomy) {
  std::vector<JudgeRecord> out;
  for_each_json_line(in, [&](const Json& j, std::size_t) { out.push_back(judge_record_from_json(j, taxonomy)); });
  return out;
}

std::vector<JudgeRecord> read_judge_records_file(const std::string& path, const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_judge_records(in, taxonomy);
}

}  // namespace docinspect::cocl
