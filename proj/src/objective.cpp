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

#include "docinspect/objective.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <sstream>

#include "docinspect/error.hpp"
#include "docinspect/latex.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::objective {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double edit_distance_norm(std::string_view a, std::string_view b) {
  const std::u32string x = unicode::decode(a), y = unicode::decode(b);
  const std::size_t longest = std::max(x.size(), y.size());
  if (longest == 0) return 0;
  return static_cast<double>(levenshtein(x, y)) / static_cast<double>(longest);
}

TreeNode table_tree(const table::TableGrid& grid) {
  TreeNode root{"table", 1, 1, "", {}};
  for (const auto& row : grid.rows) {
    TreeNode tr{"tr", 1, 1, "", {}};
    for (const auto& cell : row) tr.children.push_back({cell.header ? "th" : "td", cell.colspan, cell.rowspan, cell.text, {}});
    root.children.push_back(std::move(tr));
  }
  return root;
}

std::size_t tree_size(const TreeNode& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += tree_size(c);
  return n;
}

double rename_cost(const TreeNode& a, const TreeNode& b, bool structure_only) {
  if (a.tag != b.tag || a.colspan != b.colspan || a.rowspan != b.rowspan) return 1;
  if (structure_only || (a.tag != "td" && a.tag != "th")) return 0;
  return edit_distance_norm(a.text, b.text);
}

namespace {

struct Flat {
  std::vector<const TreeNode*> nodes;  // postorder
  std::vector<std::size_t> lml;        // leftmost leaf descendant, postorder index
  std::vector<std::size_t> keyroots;
};

std::size_t flatten(const TreeNode& n, Flat& f) {
  std::optional<std::size_t> leftmost;
  for (const auto& c : n.children) {
    const std::size_t l = flatten(c, f);
    if (!leftmost) leftmost = l;
  }
  const std::size_t index = f.nodes.size();
  f.nodes.push_back(&n);
  f.lml.push_back(leftmost.value_or(index));
  return f.lml.back();
}

Flat prepare(const TreeNode& root) {
  Flat f;
  flatten(root, f);
  std::map<std::size_t, std::size_t> highest;
  for (std::size_t i = 0; i < f.nodes.size(); ++i) highest[f.lml[i]] = i;
  for (const auto& [_, i] : highest) f.keyroots.push_back(i);
  std::sort(f.keyroots.begin(), f.keyroots.end());
  return f;
}

}  // namespace

double tree_edit_distance(const TreeNode& a, const TreeNode& b, bool structure_only) {
  const Flat A = prepare(a), B = prepare(b);
  const std::size_t n = A.nodes.size(), m = B.nodes.size();
  std::vector<std::vector<double>> td(n, std::vector<double>(m, 0));
  std::vector<std::vector<double>> fd;
  for (std::size_t i : A.keyroots) {
    for (std::size_t j : B.keyroots) {
      const std::size_t li = A.lml[i], lj = B.lml[j];
      const std::size_t rows = i - li + 2, cols = j - lj + 2;
      fd.assign(rows, std::vector<double>(cols, 0));
      for (std::size_t x = 1; x < rows; ++x) fd[x][0] = fd[x - 1][0] + 1;
      for (std::size_t y = 1; y < cols; ++y) fd[0][y] = fd[0][y - 1] + 1;
      for (std::size_t x = 1; x < rows; ++x) {
        const std::size_t i1 = li + x - 1;
        for (std::size_t y = 1; y < cols; ++y) {
          const std::size_t j1 = lj + y - 1;
          if (A.lml[i1] == li && B.lml[j1] == lj) {
            fd[x][y] = std::min({fd[x - 1][y] + 1, fd[x][y - 1] + 1,
                                 fd[x - 1][y - 1] + rename_cost(*A.nodes[i1], *B.nodes[j1], structure_only)});
            td[i1][j1] = fd[x][y];
          } else {
            fd[x][y] = std::min({fd[x - 1][y] + 1, fd[x][y - 1] + 1, fd[A.lml[i1] - li][B.lml[j1] - lj] + td[i1][j1]});
          }
        }
      }
    }
  }
  return td[n - 1][m - 1];
}

TedsResult teds(std::string_view pred_html, std::string_view gt_html, bool structure_only) {
  const table::TableGrid gt = table::parse_table(gt_html);
  table::TableGrid pred;
  try {
    pred = table::parse_table(pred_html);
  } catch (const ValidationError&) {
    return {0, true};
  }
  const TreeNode tp = table_tree(pred), tg = table_tree(gt);
  const double dist = tree_edit_distance(tp, tg, structure_only);
  const auto denom = static_cast<double>(std::max(tree_size(tp), tree_size(tg)));
  return {1.0 - dist / denom, false};
}

std::map<std::string, double> case_metrics(const ParsingCase& c) {
  switch (c.element) {
    case ElementKind::Text:
      return {{"edit_distance", edit_distance_norm(c.prediction, c.ground_truth)}};
    case ElementKind::Table:
      return {{"teds", teds(c.prediction, c.ground_truth, false).score},
              {"s_teds", teds(c.prediction, c.ground_truth, true).score}};
    case ElementKind::Equation:
      return {{"edit_distance",
               edit_distance_norm(latex::strip_math_delimiters(c.prediction), latex::strip_math_delimiters(c.ground_truth))}};
  }
  return {};
}

namespace {

void add(Bucket& b, const std::map<std::string, double>& metrics) {
  ++b.count;
  for (const auto& [name, value] : metrics) {
    const std::size_t k = ++b.n[name];
    double& mean = b.mean[name];
    mean += (value - mean) / static_cast<double>(k);
  }
}

}  // namespace

AlignmentReport alignment_report(const std::vector<AlignmentItem>& items) {
  AlignmentReport r;
  for (const auto& item : items) {
    const std::size_t n = item.judgment.detected.size() + item.judgment.unknown_types.size();
    std::string key;
    if (item.judgment.verdict == cocl::Verdict::Good) key = "good";
    else if (n == 0) key = "bad_unspecified";
    else key = "bad_" + std::to_string(n);
    add(r.by_count[key], item.metrics);
    if (item.judgment.verdict == cocl::Verdict::Bad && item.judgment.detected.size() == 1 &&
        item.judgment.unknown_types.empty()) {
      add(r.by_type[*item.judgment.detected.begin()], item.metrics);
    }
  }
  return r;
}

std::vector<AlignmentItem> alignment_items(const std::vector<ParsingCase>& cases,
                                           const std::vector<cocl::JudgeRecord>& judgments) {
  std::map<std::string, const cocl::JudgeRecord*> first;
  for (const auto& j : judgments) {
    auto [it, inserted] = first.emplace(j.case_id, &j);
    if (!inserted && j.sample_index < it->second->sample_index) it->second = &j;
  }
  std::vector<AlignmentItem> out;
  for (const auto& c : cases) {
    auto it = first.find(c.id);
    if (it == first.end()) throw ValidationError("no judgment for case '" + c.id + "'");
    out.push_back({c.id, c.element, case_metrics(c), it->second->output});
  }
  return out;
}

OrderedJson to_json(const AlignmentReport& report) {
  auto buckets = [](const std::map<std::string, Bucket>& m) {
    OrderedJson j = OrderedJson::object();
    for (const auto& [key, b] : m) {
      OrderedJson bj;
      bj["count"] = b.count;
      OrderedJson means = OrderedJson::object();
      for (const auto& [name, v] : b.mean) means[name] = {{"mean", v}, {"n", b.n.at(name)}};
      bj["metrics"] = means;
      j[key] = bj;
    }
    return j;
  };
  OrderedJson j;
  j["metric_orientation"] = {{"edit_distance", "lower is better"}, {"teds", "higher is better"},
                             {"s_teds", "higher is better"}};
  j["by_error_count"] = buckets(report.by_count);
  j["by_error_type"] = buckets(report.by_type);
  return j;
}

std::string render_table(const AlignmentReport& report) {
  std::ostringstream out;
  char line[256];
  auto section = [&](const char* title, const std::map<std::string, Bucket>& m) {
    out << title << "\n";
    std::snprintf(line, sizeof line, "  %-36s %6s %14s %8s %8s\n", "bucket", "count", "edit_distance", "teds", "s_teds");
    out << line;
    for (const auto& [key, b] : m) {
      auto cell = [&](const char* name) {
        auto it = b.mean.find(name);
        char buf[32];
        if (it == b.mean.end()) return std::string("-");
        std::snprintf(buf, sizeof buf, "%.4f", it->second);
        return std::string(buf);
      };
      std::snprintf(line, sizeof line, "  %-36s %6zu %14s %8s %8s\n", key.c_str(), b.count, cell("edit_distance").c_str(),
                    cell("teds").c_str(), cell("s_teds").c_str());
      out << line;
    }
  };
  section("by detected-error count", report.by_count);
  section("by error type (single-error verdicts)", report.by_type);
  return out.str();
}

}  // namespace docinspect::objective
