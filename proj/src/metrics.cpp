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

#include "docinspect/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "docinspect/error.hpp"

namespace docinspect::metrics {

std::vector<CaseJudgment> join(const std::vector<ParsingCase>& cases, const std::vector<cocl::JudgeRecord>& records) {
  std::map<std::string, std::vector<const cocl::JudgeRecord*>> by_case;
  for (const auto& r : records) by_case[r.case_id].push_back(&r);
  std::set<std::string> known;
  std::vector<CaseJudgment> out;
  for (const auto& c : cases) {
    known.insert(c.id);
    auto it = by_case.find(c.id);
    if (it == by_case.end()) throw ValidationError("no judge output for case '" + c.id + "'");
    auto samples = it->second;
    std::stable_sort(samples.begin(), samples.end(),
                     [](const auto* a, const auto* b) { return a->sample_index < b->sample_index; });
    CaseJudgment j{c.id, c.element, c.gold_errors, {}};
    for (const auto* s : samples) j.predictions.push_back(s->output);
    out.push_back(std::move(j));
  }
  for (const auto& [id, _] : by_case) {
    if (!known.count(id)) throw ValidationError("judge output for unknown case '" + id + "'");
  }
  return out;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

// Harmonic mean of precision and recall from the counts, as one division so
// the result is correctly rounded.
double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0;
  return static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
}

const cocl::JudgeOutput& first(const CaseJudgment& j) {
  if (j.predictions.empty()) throw ValidationError("case '" + j.case_id + "' has no judge output");
  return j.predictions.front();
}

}  // namespace

CaseScores case_scores(const std::vector<CaseJudgment>& judgments) {
  CaseScores s;
  for (const auto& j : judgments) {
    const bool gold_bad = !j.gold_errors.empty();
    const bool pred_bad = first(j).verdict == cocl::Verdict::Bad;
    if (gold_bad && pred_bad) ++s.tp;
    else if (!gold_bad && pred_bad) ++s.fp;
    else if (gold_bad && !pred_bad) ++s.fn;
    else ++s.tn;
  }
  s.precision = ratio(s.tp, s.tp + s.fp, s.degenerate);
  s.recall = ratio(s.tp, s.tp + s.fn, s.degenerate);
  s.f1 = f1_from_counts(s.tp, s.fp, s.fn);
  s.macro_f1 = (s.f1 + f1_from_counts(s.tn, s.fn, s.fp)) / 2;
  s.accuracy = ratio(s.tp + s.tn, judgments.size(), s.degenerate);
  return s;
}

double case_f1(const std::vector<CaseJudgment>& judgments) {
  if (judgments.empty()) throw ValidationError("no judgments to score");
  return case_scores(judgments).f1;
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf p{tp, fp, fn, 0, 0, 0, false};
  if (tp + fp == 0 && tp + fn == 0) {
    p.precision = p.recall = p.f1 = 1;
    p.degenerate = true;
    return p;
  }
  p.precision = ratio(tp, tp + fp, p.degenerate);
  p.recall = ratio(tp, tp + fn, p.degenerate);
  p.f1 = f1_from_counts(tp, fp, fn);
  return p;
}

std::set<std::string> predicted_set(const cocl::JudgeOutput& out) {
  std::set<std::string> s = out.detected;
  for (const auto& u : out.unknown_types) s.insert("?" + u);
  return s;
}

namespace {

void tally(const std::set<std::string>& gold, const std::set<std::string>& pred, std::size_t& tp, std::size_t& fp,
           std::size_t& fn) {
  for (const auto& p : pred) {
    if (gold.count(p)) ++tp;
    else ++fp;
  }
  for (const auto& g : gold) {
    if (!pred.count(g)) ++fn;
  }
}

double case_level_f1(const std::set<std::string>& gold, const std::set<std::string>& pred) {
  std::size_t tp = 0, fp = 0, fn = 0;
  tally(gold, pred, tp, fp, fn);
  return prf_from_counts(tp, fp, fn).f1;
}

std::set<std::string> chosen_prediction(const CaseJudgment& j, std::size_t k, PassMode mode) {
  if (j.predictions.size() < k) {
    throw ValidationError("case '" + j.case_id + "' has " + std::to_string(j.predictions.size()) +
                          " samples, fewer than k=" + std::to_string(k));
  }
  if (mode == PassMode::Union) {
    std::set<std::string> u;
    for (std::size_t i = 0; i < k; ++i) {
      auto s = predicted_set(j.predictions[i]);
      u.insert(s.begin(), s.end());
    }
    return u;
  }
  std::set<std::string> best = predicted_set(j.predictions[0]);
  double best_f1 = case_level_f1(j.gold_errors, best);
  for (std::size_t i = 1; i < k; ++i) {
    auto s = predicted_set(j.predictions[i]);
    const double f = case_level_f1(j.gold_errors, s);
    if (f > best_f1) {
      best_f1 = f;
      best = std::move(s);
    }
  }
  return best;
}

}  // namespace

Prf type_prf(const std::vector<CaseJudgment>& judgments) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& j : judgments) tally(j.gold_errors, predicted_set(first(j)), tp, fp, fn);
  return prf_from_counts(tp, fp, fn);
}

Prf pass_at_k(const std::vector<CaseJudgment>& judgments, std::size_t k, PassMode mode) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& j : judgments) tally(j.gold_errors, chosen_prediction(j, k, mode), tp, fp, fn);
  return prf_from_counts(tp, fp, fn);
}

EvalReport build_report(const std::vector<CaseJudgment>& judgments, std::size_t k, PassMode mode) {
  EvalReport report;
  report.k = k;
  report.mode = mode;
  report.empty = judgments.empty();
  std::map<std::string, std::vector<CaseJudgment>> groups;
  for (const auto& j : judgments) {
    groups[std::string(to_string(j.element))].push_back(j);
    groups["overall"].push_back(j);
  }
  if (judgments.empty()) groups["overall"];
  for (const auto& [name, group] : groups) {
    ElementReport e;
    e.cases = group.size();
    e.case_scores = case_scores(group);
    e.type = group.empty() ? Prf{} : pass_at_k(group, k, mode);
    for (const auto& j : group) {
      const auto pred = chosen_prediction(j, k, mode);
      for (const auto& p : pred) {
        const std::string key = p.rfind('?', 0) == 0 ? "unknown" : p;
        if (j.gold_errors.count(p)) ++e.per_type[key].tp;
        else ++e.per_type[key].fp;
      }
      for (const auto& g : j.gold_errors) {
        if (!pred.count(g)) ++e.per_type[g].fn;
      }
      for (std::size_t i = 0; i < std::min(k, j.predictions.size()); ++i) {
        if (!j.predictions[i].format_ok) ++e.format_failures;
      }
    }
    double macro = 0;
    std::size_t n = 0;
    for (const auto& [type, c] : e.per_type) {
      if (type == "unknown") continue;
      macro += prf_from_counts(c.tp, c.fp, c.fn).f1;
      ++n;
    }
    e.type_macro_f1 = n ? macro / static_cast<double>(n) : 0;
    report.per_element[name] = std::move(e);
  }
  return report;
}

OrderedJson to_json(const EvalReport& report) {
  OrderedJson j;
  j["k"] = report.k;
  j["pass_mode"] = report.mode == PassMode::Union ? "union" : "best_of_k";
  j["empty"] = report.empty;
  OrderedJson elements = OrderedJson::object();
  for (const auto& [name, e] : report.per_element) {
    OrderedJson ej;
    ej["cases"] = e.cases;
    OrderedJson c;
    c["positive_class"] = "bad";
    c["precision"] = e.case_scores.precision;
    c["recall"] = e.case_scores.recall;
    c["f1"] = e.case_scores.f1;
    c["macro_f1"] = e.case_scores.macro_f1;
    c["accuracy"] = e.case_scores.accuracy;
    c["tp"] = e.case_scores.tp;
    c["fp"] = e.case_scores.fp;
    c["fn"] = e.case_scores.fn;
    c["tn"] = e.case_scores.tn;
    c["degenerate"] = e.case_scores.degenerate;
    ej["case"] = c;
    OrderedJson t;
    t["precision"] = e.type.precision;
    t["recall"] = e.type.recall;
    t["f1"] = e.type.f1;
    t["macro_f1"] = e.type_macro_f1;
    t["tp"] = e.type.tp;
    t["fp"] = e.type.fp;
    t["fn"] = e.type.fn;
    t["degenerate"] = e.type.degenerate;
    ej["type"] = t;
    OrderedJson per = OrderedJson::object();
    for (const auto& [type, counts] : e.per_type) per[type] = {{"tp", counts.tp}, {"fp", counts.fp}, {"fn", counts.fn}};
    ej["per_type"] = per;
    ej["format_failures"] = e.format_failures;
    elements[name] = ej;
  }
  j["elements"] = elements;
  return j;
}

std::string render_table(const EvalReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %7s %8s %8s %8s %8s %8s\n", "element", "cases", "case_f1", "type_p",
                "type_r", "type_f1", "fmt_err");
  out << line;
  auto row = [&](const std::string& name, const ElementReport& e) {
    std::snprintf(line, sizeof line, "%-10s %7zu %8.2f %8.2f %8.2f %8.2f %8zu\n", name.c_str(), e.cases,
                  100 * e.case_scores.f1, 100 * e.type.precision, 100 * e.type.recall, 100 * e.type.f1,
                  e.format_failures);
    out << line;
  };
  for (ElementKind kind : kAllElements) {
    auto it = report.per_element.find(std::string(to_string(kind)));
    if (it != report.per_element.end()) row(it->first, it->second);
  }
  if (auto it = report.per_element.find("overall"); it != report.per_element.end()) row("overall", it->second);
  if (report.k > 1) out << "(pass@" << report.k << ", " << (report.mode == PassMode::Union ? "union" : "best-of-k") << ")\n";
  return out.str();
}

}  // namespace docinspect::metrics
