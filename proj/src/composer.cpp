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

#include "docinspect/composer.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "docinspect/error.hpp"
#include "docinspect/resources.hpp"
#include "docinspect/synth_llm.hpp"
#include "docinspect/table.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::compose {

namespace pt = boost::property_tree;

void DistributionTarget::validate() const {
  for (double f : {good_fraction, single_fraction, multi_fraction}) {
    if (!(f >= 0 && f <= 1)) throw ValidationError("fractions must lie in [0, 1]");
  }
  if (std::abs(good_fraction + single_fraction + multi_fraction - 1.0) > 1e-6) {
    throw ValidationError("fractions must sum to 1");
  }
  double size_total = 0;
  for (const auto& [size, w] : multi_size_weights) {
    if (size < 2 || size > 4) throw ValidationError("multi size " + std::to_string(size) + " outside 2..4");
    if (!(w >= 0)) throw ValidationError("negative multi size weight");
    size_total += w;
  }
  if (multi_fraction > 0 && size_total <= 0) throw ValidationError("multi size weights are all zero");
  double type_total = 0;
  for (const auto& [id, w] : per_type_weights) {
    Taxonomy::builtin().at(id);
    if (!(w >= 0)) throw ValidationError("negative weight for '" + id + "'");
    type_total += w;
  }
  if (!per_type_weights.empty() && type_total <= 0) throw ValidationError("type weights are all zero");
}

namespace {

double parse_number(const std::string& text, const std::string& key) {
  const std::string t = unicode::trim(text);
  double v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ValidationError("'" + key + "' is not a number: " + t);
  return v;
}

std::map<int, double> parse_size_weights(const std::string& text) {
  std::map<int, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("multi_size_weights entry '" + item + "' lacks ':'");
    const double size = parse_number(item.substr(0, colon), "multi_size_weights");
    if (size != std::floor(size)) throw ValidationError("multi size must be an integer");
    out[static_cast<int>(size)] = parse_number(item.substr(colon + 1), "multi_size_weights");
  }
  return out;
}

}  // namespace

DistributionTarget parse_target(std::string_view ini_text) {
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("target: ") + e.what());
  }
  DistributionTarget t;
  for (const auto& [section, body] : tree) {
    if (section == "distribution") {
      for (const auto& [key, value] : body) {
        const std::string v = value.get_value<std::string>();
        if (key == "good_fraction") t.good_fraction = parse_number(v, key);
        else if (key == "single_fraction") t.single_fraction = parse_number(v, key);
        else if (key == "multi_fraction") t.multi_fraction = parse_number(v, key);
        else if (key == "multi_size_weights") t.multi_size_weights = parse_size_weights(v);
        else throw ValidationError("unknown key 'distribution." + key + "'");
      }
    } else if (section == "type_weights") {
      for (const auto& [key, value] : body) {
        if (!Taxonomy::builtin().find(key)) throw ValidationError("unknown key 'type_weights." + key + "'");
        t.per_type_weights[key] = parse_number(value.get_value<std::string>(), key);
      }
    } else {
      throw ValidationError("unknown section '" + section + "'");
    }
  }
  if (t.multi_size_weights.empty()) t.multi_size_weights = {{2, 1}, {3, 1}, {4, 1}};
  t.validate();
  return t;
}

DistributionTarget load_target_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_target(ss.str());
}

std::vector<std::string> preset_names() { return {"reference-2024"}; }

DistributionTarget preset(std::string_view name) {
  const std::string path = "presets/" + std::string(name) + ".ini";
  if (!resources::contains(path)) throw ValidationError("unknown preset '" + std::string(name) + "'");
  return parse_target(resources::get(path));
}

int order_rank(const ErrorType& type) {
  auto ends = [&](std::string_view suffix) {
    return type.level.size() >= suffix.size() &&
           type.level.compare(type.level.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  if (ends("_type")) return 0;
  if (ends("_integrity") || ends("_structure")) return 1;
  if (ends("_span") || ends("_inline_formula")) return 2;
  return 3;
}

std::vector<text::Donor> donor_pool(const std::vector<ElementRecord>& records) {
  std::vector<text::Donor> pool;
  for (const auto& r : records) {
    if (r.element == ElementKind::Text) pool.push_back({r.id, r.ground_truth});
  }
  return pool;
}

namespace {

// One applied perturbation before it is merged into the case.
struct Step {
  std::string output;
  PerturbationReceipt receipt;
  // Tables only: input cell -> output cell (or -1), and input cells changed.
  std::vector<long> cell_map;
  std::vector<std::size_t> touched_input;
};

struct TableDiff {
  std::vector<long> cell_map;
  std::vector<std::size_t> touched_input;
  std::vector<std::size_t> touched_output;
};

std::vector<std::pair<table::Cell, bool>> flatten(const table::TableGrid& g) {
  std::vector<std::pair<table::Cell, bool>> out;
  for (const auto& row : g.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out.emplace_back(row[i], i == 0);
  }
  return out;
}

// Cells outside the common row-major prefix and suffix count as changed.
TableDiff grid_diff(const table::TableGrid& a, const table::TableGrid& b) {
  const auto fa = flatten(a), fb = flatten(b);
  std::size_t pre = 0;
  while (pre < fa.size() && pre < fb.size() && fa[pre] == fb[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < fa.size() - pre && suf < fb.size() - pre && fa[fa.size() - 1 - suf] == fb[fb.size() - 1 - suf]) ++suf;
  TableDiff d;
  d.cell_map.assign(fa.size(), -1);
  for (std::size_t i = 0; i < pre; ++i) d.cell_map[i] = static_cast<long>(i);
  for (std::size_t i = fa.size() - suf; i < fa.size(); ++i) {
    d.cell_map[i] = static_cast<long>(i - fa.size() + fb.size());
  }
  for (std::size_t i = pre; i < fa.size() - suf; ++i) d.touched_input.push_back(i);
  for (std::size_t i = pre; i < fb.size() - suf; ++i) d.touched_output.push_back(i);
  return d;
}

bool is_llm(const ErrorType& t) { return t.synthesis_mode == SynthesisMode::LlmGuided; }

table::TableEdit run_table_rule(const std::string& id, const table::TableGrid& grid, std::uint64_t seed) {
  Rng rng(seed);
  if (id == "missing_table_row_column") return table::delete_rows_columns(grid, rng);
  if (id == "table_cell_lost") return table::delete_cells(grid, rng);
  throw ValidationError("'" + id + "' has no table rule");
}

Step apply_step(const ErrorType& type, const std::string& input, std::uint64_t seed, const ComposeContext& ctx) {
  Step step;
  if (type.synthesis_mode == SynthesisMode::RealWorldSelection) {
    throw PreconditionError("real-world selection is not composable");
  }
  if (is_llm(type)) {
    if (!ctx.llm) throw PreconditionError("no model client configured");
    synth::LlmInjector injector(*ctx.llm, ctx.llm_attempts);
    auto p = injector.apply(type.id, input, seed);
    step.output = std::move(p.output);
    step.receipt = std::move(p.receipt);
    if (type.element == ElementKind::Table) {
      const auto diff = grid_diff(table::parse_table(input), table::parse_table(step.output));
      step.cell_map = diff.cell_map;
      step.touched_input = diff.touched_input;
      for (std::size_t c : diff.touched_output) step.receipt.spans_touched.push_back({c, c + 1});
    }
    return step;
  }
  if (type.element == ElementKind::Table) {
    const auto grid = table::parse_table(input);
    auto edit = run_table_rule(type.id, grid, seed);
    step.output = table::serialize_table(edit.grid);
    step.receipt.error_type = type.id;
    step.receipt.rng_seed = seed;
    step.receipt.parameters = edit.parameters;
    for (std::size_t c : edit.touched_output) step.receipt.spans_touched.push_back({c, c + 1});
    step.cell_map = std::move(edit.cell_map);
    step.touched_input = std::move(edit.touched_input);
    if (canonical_equal(ElementKind::Table, input, step.output)) {
      throw PreconditionError("perturbation leaves the table unchanged");
    }
    return step;
  }
  Rng rng(seed);
  auto p = text::apply_rule(type.id, input, rng, ctx.text);
  step.output = std::move(p.output);
  step.receipt = std::move(p.receipt);
  return step;
}

bool text_conflict(const std::vector<Splice>& edits, const std::vector<Span>& protect) {
  for (const auto& e : edits) {
    for (const auto& p : protect) {
      if (p.start == p.end) {
        if (e.start <= p.start && p.start <= e.end) return true;
      } else if (e.start < p.end && p.start < e.end) {
        return true;
      }
    }
  }
  return false;
}

long delta(const Splice& e) {
  return static_cast<long>(unicode::length(e.replacement)) - static_cast<long>(e.end - e.start);
}

// Edits never straddle a protected boundary, so a position maps by the sum
// of the length changes of edits fully before it.
Span remap(const Span& s, const std::vector<Splice>& edits) {
  long ds = 0, de = 0;
  for (const auto& e : edits) {
    if (e.end <= s.start) ds += delta(e);
    if (e.end <= s.end && e.start < s.end) de += delta(e);
  }
  if (s.start == s.end) de = ds;
  return {static_cast<std::size_t>(static_cast<long>(s.start) + ds), static_cast<std::size_t>(static_cast<long>(s.end) + de)};
}

bool table_conflict(const Step& step, const std::set<std::size_t>& protect) {
  for (std::size_t c : protect) {
    if (c >= step.cell_map.size() || step.cell_map[c] < 0) return true;
    if (std::binary_search(step.touched_input.begin(), step.touched_input.end(), c)) return true;
  }
  return false;
}

std::string case_id_for(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "case-%06zu", index + 1);
  return buf;
}

}  // namespace

ComposeResult compose_case(const ElementRecord& record, const std::vector<std::string>& types,
                           const std::string& case_id, const ComposeContext& ctx) {
  const Taxonomy& tax = Taxonomy::builtin();
  std::vector<const ErrorType*> chosen;
  for (const auto& id : types) {
    const ErrorType& t = tax.at(id);
    if (t.element != record.element) {
      throw ValidationError("'" + id + "' does not apply to " + std::string(to_string(record.element)) + " elements");
    }
    chosen.push_back(&t);
  }
  if (static_cast<int>(chosen.size()) > ctx.policy.max_errors_per_case) {
    throw ValidationError("more than " + std::to_string(ctx.policy.max_errors_per_case) + " error types");
  }
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    for (std::size_t j = i + 1; j < chosen.size(); ++j) {
      if (!compatible(*chosen[i], *chosen[j], ctx.policy)) {
        throw ValidationError("incompatible error types '" + chosen[i]->id + "' and '" + chosen[j]->id + "'");
      }
    }
  }
  std::stable_sort(chosen.begin(), chosen.end(),
                   [](const ErrorType* a, const ErrorType* b) { return order_rank(*a) < order_rank(*b); });

  ComposeResult result;
  ParsingCase& c = result.parsing_case;
  c.id = case_id;
  c.element_record_id = record.id;
  c.element = record.element;
  c.image_ref = record.image_ref;
  c.ground_truth = record.ground_truth;
  c.prediction = record.ground_truth;
  c.provenance = Provenance::RuleBased;

  std::string current = record.ground_truth;
  std::vector<Span> protect_text;
  std::set<std::size_t> protect_cells;
  const bool is_table = record.element == ElementKind::Table;

  for (const ErrorType* type : chosen) {
    const std::uint64_t base = derive_seed(ctx.dataset_seed, case_id, type->id);
    const int attempts = std::max(1, is_llm(*type) ? ctx.llm_redraws : ctx.max_attempts);
    std::string reason = "no attempt";
    bool applied = false;
    for (int attempt = 0; attempt < attempts && !applied; ++attempt) {
      const std::uint64_t seed = attempt == 0 ? base : attempt_seed(base, attempt);
      Step step;
      try {
        step = apply_step(*type, current, seed, ctx);
      } catch (const PreconditionError& e) {
        reason = e.what();
        // Deterministic injectors fail the same way on every seed.
        if (type->id == "title_format_error" || type->id == "superscript_citation_format_error") break;
        continue;
      }
      if (is_table) {
        if (table_conflict(step, protect_cells)) {
          reason = "overlaps an earlier perturbation";
          continue;
        }
        std::set<std::size_t> next;
        for (std::size_t p : protect_cells) next.insert(static_cast<std::size_t>(step.cell_map[p]));
        for (auto& r : c.synthesis_trace) {
          for (auto& s : r.spans_touched) {
            const auto m = static_cast<std::size_t>(step.cell_map[s.start]);
            s = {m, m + 1};
          }
        }
        for (const auto& s : step.receipt.spans_touched) next.insert(s.start);
        protect_cells = std::move(next);
      } else {
        if (text_conflict(step.receipt.edits, protect_text)) {
          reason = "overlaps an earlier perturbation";
          continue;
        }
        for (auto& p : protect_text) p = remap(p, step.receipt.edits);
        for (auto& r : c.synthesis_trace) {
          for (auto& s : r.spans_touched) s = remap(s, step.receipt.edits);
        }
        for (const auto& s : step.receipt.spans_touched) protect_text.push_back(s);
      }
      current = std::move(step.output);
      c.synthesis_trace.push_back(std::move(step.receipt));
      c.gold_errors.insert(type->id);
      if (is_llm(*type)) c.provenance = Provenance::LlmGuided;
      applied = true;
    }
    if (!applied) result.dropped.push_back(type->id + ": " + reason);
  }
  if (!chosen.empty() && c.gold_errors.empty()) {
    std::string why;
    for (const auto& d : result.dropped) why += (why.empty() ? "" : "; ") + d;
    throw PreconditionError("infeasible case: " + why);
  }
  c.prediction = current;
  if (!c.gold_errors.empty() && canonical_equal(c.element, c.ground_truth, c.prediction)) {
    throw PreconditionError("label-unsound composition: prediction equals the ground truth");
  }
  return result;
}

std::string replay(const ParsingCase& c) {
  std::string current = c.ground_truth;
  for (const auto& r : c.synthesis_trace) {
    const ErrorType& type = Taxonomy::builtin().at(r.error_type);
    if (c.element == ElementKind::Table) {
      if (type.synthesis_mode != SynthesisMode::RuleBased) {
        auto it = r.parameters.find("output_html");
        if (it == r.parameters.end()) throw ValidationError("receipt for '" + r.error_type + "' lacks output_html");
        current = it->second;
      } else {
        current = table::serialize_table(run_table_rule(r.error_type, table::parse_table(current), r.rng_seed).grid);
      }
    } else {
      current = apply_splices(current, r.edits);
    }
  }
  return current;
}

std::vector<std::string> applicable_types(const ElementRecord& record, const ComposeContext& ctx) {
  std::vector<std::string> out;
  for (const ErrorType* t : Taxonomy::builtin().types_of(record.element)) {
    if (t->synthesis_mode == SynthesisMode::RealWorldSelection) continue;
    if (is_llm(*t)) {
      if (!ctx.llm || unicode::trim(record.ground_truth).empty()) continue;
      if (t->id == "inline_formula_style_error") {
        const auto regions = text::find_formula_regions(unicode::decode(record.ground_truth));
        if (std::none_of(regions.begin(), regions.end(), [](const auto& r) { return !r.display; })) continue;
      }
      if (t->element == ElementKind::Table) {
        try {
          table::parse_table(record.ground_truth);
        } catch (const ValidationError&) {
          continue;
        }
      }
      out.push_back(t->id);
      continue;
    }
    try {
      apply_step(*t, record.ground_truth, derive_seed(ctx.dataset_seed, record.id, t->id), ctx);
      out.push_back(t->id);
    } catch (const PreconditionError&) {
    } catch (const ValidationError&) {
    }
  }
  return out;
}

namespace {

double weight_of(const DistributionTarget& target, const std::string& id) {
  if (target.per_type_weights.empty()) return 1.0;
  auto it = target.per_type_weights.find(id);
  return it == target.per_type_weights.end() ? 0.0 : it->second;
}

bool compatible_ids(const std::string& a, const std::string& b, const CompatibilityPolicy& policy) {
  const Taxonomy& tax = Taxonomy::builtin();
  return a != b && compatible(tax.at(a), tax.at(b), policy);
}

bool has_partner(const std::vector<std::string>& types, const std::string& t, const DistributionTarget& target,
                 const CompatibilityPolicy& policy) {
  return std::any_of(types.begin(), types.end(), [&](const std::string& o) {
    return weight_of(target, o) > 0 && compatible_ids(t, o, policy);
  });
}

std::vector<std::size_t> quotas(const DistributionTarget& t, std::size_t n) {
  const double f[3] = {t.good_fraction, t.single_fraction, t.multi_fraction};
  std::vector<std::size_t> q(3);
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = f[i] * static_cast<double>(n);
    q[i] = static_cast<std::size_t>(std::floor(exact));
    used += q[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n; ++i, ++used) ++q[rem[i % 3].second];
  return q;
}

std::size_t draw_size(const DistributionTarget& target, const CompatibilityPolicy& policy, Rng& rng) {
  std::vector<int> sizes;
  std::vector<double> w;
  for (const auto& [size, weight] : target.multi_size_weights) {
    if (size <= policy.max_errors_per_case && weight > 0) {
      sizes.push_back(size);
      w.push_back(weight);
    }
  }
  if (sizes.empty()) throw ValidationError("infeasible target: no multi size allowed by the policy");
  return static_cast<std::size_t>(sizes[rng.weighted(w)]);
}

// Adds weighted compatible types to `chosen` until it holds `size` types.
void extend_types(std::vector<std::string>& chosen, const std::vector<std::string>& pool, std::size_t size,
                  const DistributionTarget& target, const CompatibilityPolicy& policy, Rng& rng) {
  while (chosen.size() < size) {
    std::vector<std::string> cand;
    std::vector<double> w;
    for (const auto& t : pool) {
      if (weight_of(target, t) <= 0) continue;
      if (std::all_of(chosen.begin(), chosen.end(), [&](const std::string& c) { return compatible_ids(c, t, policy); })) {
        cand.push_back(t);
        w.push_back(weight_of(target, t));
      }
    }
    if (cand.empty()) return;
    chosen.push_back(cand[rng.weighted(w)]);
  }
}

// Types for a fixed record and category size (1 or >= 2).
std::vector<std::string> draw_types(const std::vector<std::string>& pool, std::size_t size,
                                    const DistributionTarget& target, const CompatibilityPolicy& policy, Rng& rng) {
  std::vector<std::string> first;
  std::vector<double> w;
  for (const auto& t : pool) {
    if (weight_of(target, t) <= 0) continue;
    if (size >= 2 && !has_partner(pool, t, target, policy)) continue;
    first.push_back(t);
    w.push_back(weight_of(target, t));
  }
  if (first.empty()) return {};
  std::vector<std::string> chosen{first[rng.weighted(w)]};
  extend_types(chosen, pool, size, target, policy, rng);
  return chosen;
}

}  // namespace

std::vector<PlanItem> sample_plan(const std::vector<ElementRecord>& records,
                                  const std::vector<std::vector<std::string>>& applicable,
                                  const DistributionTarget& target, std::size_t n, Rng& rng,
                                  const CompatibilityPolicy& policy) {
  target.validate();
  if (applicable.size() != records.size()) throw ValidationError("applicability table does not match the records");
  if (records.empty() && n > 0) throw ValidationError("infeasible target: no records");
  const auto q = quotas(target, n);

  // type -> records supporting it alone, and with a compatible partner
  std::map<std::string, std::vector<std::size_t>> single_pool, multi_pool;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (const auto& t : applicable[r]) {
      if (weight_of(target, t) <= 0) continue;
      single_pool[t].push_back(r);
      if (has_partner(applicable[r], t, target, policy)) multi_pool[t].push_back(r);
    }
  }
  auto keys_weights = [&](const std::map<std::string, std::vector<std::size_t>>& pool) {
    std::pair<std::vector<std::string>, std::vector<double>> kw;
    for (const auto& [t, rs] : pool) {
      kw.first.push_back(t);
      kw.second.push_back(weight_of(target, t));
    }
    return kw;
  };
  const auto [single_types, single_w] = keys_weights(single_pool);
  const auto [multi_types, multi_w] = keys_weights(multi_pool);
  if (q[1] > 0 && single_types.empty()) throw ValidationError("infeasible target: no record supports a single error");
  if (q[2] > 0 && multi_types.empty()) {
    throw ValidationError("infeasible target: no record supports two composable error types");
  }

  std::vector<int> categories;
  for (int cat = 0; cat < 3; ++cat) categories.insert(categories.end(), q[static_cast<std::size_t>(cat)], cat);
  rng.shuffle(categories);

  std::vector<PlanItem> plans;
  plans.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PlanItem item;
    item.case_id = case_id_for(i);
    if (categories[i] == 0) {
      item.record_id = records[rng.below(records.size())].id;
    } else if (categories[i] == 1) {
      const std::string& t = single_types[rng.weighted(single_w)];
      const auto& rs = single_pool.at(t);
      item.record_id = records[rs[rng.below(rs.size())]].id;
      item.types = {t};
    } else {
      const std::size_t size = draw_size(target, policy, rng);
      const std::string& t = multi_types[rng.weighted(multi_w)];
      const auto& rs = multi_pool.at(t);
      const std::size_t r = rs[rng.below(rs.size())];
      item.record_id = records[r].id;
      item.types = {t};
      extend_types(item.types, applicable[r], size, target, policy, rng);
    }
    plans.push_back(std::move(item));
  }
  return plans;
}

std::vector<PlanItem> sample_plan(const std::vector<ElementRecord>& records, const DistributionTarget& target,
                                  std::size_t n, Rng& rng, const ComposeContext& ctx) {
  std::vector<std::vector<std::string>> applicable;
  applicable.reserve(records.size());
  for (const auto& r : records) applicable.push_back(applicable_types(r, ctx));
  return sample_plan(records, applicable, target, n, rng, ctx.policy);
}

PipelineResult run_pipeline(const std::vector<ElementRecord>& records, const DistributionTarget& target, std::size_t n,
                            const ComposeContext& base_ctx, unsigned workers) {
  ComposeContext ctx = base_ctx;
  if (ctx.text.donor_pool.empty()) ctx.text.donor_pool = donor_pool(records);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!index.emplace(records[i].id, i).second) throw ValidationError("duplicate record id '" + records[i].id + "'");
  }

  std::vector<std::vector<std::string>> applicable(records.size());
  {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next++) < records.size();) applicable[i] = applicable_types(records[i], ctx);
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }

  Rng rng(derive_seed(ctx.dataset_seed, "plan", "sample_plan"));
  const auto plans = sample_plan(records, applicable, target, n, rng, ctx.policy);

  std::vector<std::optional<ParsingCase>> slots(plans.size());
  std::vector<std::vector<std::string>> logs(plans.size());
  std::atomic<std::size_t> next{0};
  auto materialize = [&](std::size_t i) {
    const PlanItem& plan = plans[i];
    const std::size_t r = index.at(plan.record_id);
    const std::size_t want = plan.types.size();
    auto category = [](std::size_t k) { return std::min<std::size_t>(k, 2); };
    std::vector<std::string> types = plan.types;
    Rng redraw(derive_seed(ctx.dataset_seed, plan.case_id, "redraw"));
    std::optional<ComposeResult> kept;
    for (int round = 0; round <= 5; ++round) {
      try {
        auto res = compose_case(records[r], types, plan.case_id, ctx);
        for (const auto& d : res.dropped) logs[i].push_back(plan.case_id + ": dropped " + d);
        const bool ok = category(res.parsing_case.gold_errors.size()) == category(want);
        if (ok || !kept) kept = std::move(res);
        if (ok) break;
      } catch (const PreconditionError& e) {
        logs[i].push_back(plan.case_id + ": " + e.what());
      }
      if (round == 5) break;
      const std::size_t size = want >= 2 ? draw_size(target, ctx.policy, redraw) : want;
      types = draw_types(applicable[r], size, target, ctx.policy, redraw);
      if (types.empty()) break;
      logs[i].push_back(plan.case_id + ": redrawing error types");
    }
    if (kept) {
      slots[i] = std::move(kept->parsing_case);
    } else {
      logs[i].push_back(plan.case_id + ": skipped");
    }
  };
  auto work = [&] {
    for (std::size_t i; (i = next++) < plans.size();) materialize(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  PipelineResult out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (slots[i]) out.cases.push_back(std::move(*slots[i]));
    for (auto& l : logs[i]) out.log.push_back(std::move(l));
  }
  return out;
}

}  // namespace docinspect::compose
