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

#include "docinspect/reward.hpp"

#include <algorithm>

#include "docinspect/metrics.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::reward {

std::string_view to_string(Branch b) { return b == Branch::GoodCase ? "good_case" : "bad_case"; }

namespace {

std::size_t count(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string_view::npos; pos = s.find(needle, pos + needle.size())) ++n;
  return n;
}

double format_score(const cocl::JudgeOutput& out, const RewardOptions& o) {
  if (o.graded_format) return graded_format_score(out.raw);
  return out.format_ok ? 1.0 : 0.0;
}

struct Overlap {
  std::size_t tp = 0;
  std::size_t pred = 0;
  std::size_t gold = 0;
};

Overlap overlap(const std::set<std::string>& gold, const cocl::JudgeOutput& out) {
  const auto pred = metrics::predicted_set(out);
  Overlap o{0, pred.size(), gold.size()};
  for (const auto& p : pred) o.tp += gold.count(p);
  return o;
}

}  // namespace

double graded_format_score(std::string_view raw) {
  int passed = 0;
  const std::size_t opens = count(raw, "<answer>");
  const std::size_t closes = count(raw, "</answer>");
  bool good = false;
  if (opens == 1 && closes == 1) {
    const std::size_t a = raw.find("<answer>") + 8;
    const std::size_t b = raw.find("</answer>");
    if (b > a) {
      std::string body = unicode::ascii_lower(unicode::trim(raw.substr(a, b - a)));
      body.erase(std::remove(body.begin(), body.end(), ' '), body.end());
      if (!body.empty() && body.back() == '.') body.pop_back();
      good = body == "goodcase";
      if (good || body == "badcase") ++passed;
    }
  }
  const std::size_t topen = count(raw, "<error_type>");
  const std::size_t tclose = count(raw, "</error_type>");
  if (topen == tclose) ++passed;
  if (!(good && topen > 0)) ++passed;
  return passed / 3.0;
}

RewardScore asymmetric_reward(const std::set<std::string>& gold, const cocl::JudgeOutput& output,
                              const RewardOptions& options) {
  RewardScore s;
  s.s_format = format_score(output, options);
  const Overlap o = overlap(gold, output);
  if (gold.empty()) {
    s.branch = Branch::GoodCase;
    // A Bad verdict naming no type is still a detection on a good case.
    s.s_precision = o.pred == 0 && output.verdict == cocl::Verdict::Good ? 1.0 : 0.0;
    s.total = options.w_format * s.s_format + options.w_precision * s.s_precision;
    return s;
  }
  s.branch = Branch::BadCase;
  s.s_f1 = 2.0 * static_cast<double>(o.tp) / static_cast<double>(o.pred + o.gold);
  s.s_recall = static_cast<double>(o.tp) / static_cast<double>(o.gold);
  s.s_precision = o.pred ? static_cast<double>(o.tp) / static_cast<double>(o.pred) : 0.0;
  s.total = options.w_format * s.s_format + options.w_f1 * s.s_f1 + options.w_recall * s.s_recall;
  return s;
}

RewardScore f1_reward(const std::set<std::string>& gold, const cocl::JudgeOutput& output, const RewardOptions& options) {
  RewardScore s;
  s.s_format = format_score(output, options);
  const Overlap o = overlap(gold, output);
  s.branch = gold.empty() ? Branch::GoodCase : Branch::BadCase;
  if (o.pred + o.gold == 0) s.s_f1 = 1.0;
  else s.s_f1 = 2.0 * static_cast<double>(o.tp) / static_cast<double>(o.pred + o.gold);
  s.total = options.w_format * s.s_format + options.w_f1 * s.s_f1;
  return s;
}

}  // namespace docinspect::reward
