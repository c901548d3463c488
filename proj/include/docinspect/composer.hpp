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
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/corpus.hpp"
#include "docinspect/modelclient.hpp"
#include "docinspect/perturb_text.hpp"
#include "docinspect/rng.hpp"
#include "docinspect/taxonomy.hpp"

namespace docinspect::compose {

struct DistributionTarget {
  double good_fraction = 0;
  double single_fraction = 0;
  double multi_fraction = 0;
  std::map<int, double> multi_size_weights;           // keys 2..4
  std::map<std::string, double> per_type_weights;     // empty means uniform

  // Throws ValidationError when fractions do not sum to 1 (within 1e-6),
  // a weight is negative, all size weights are zero, or a type id is unknown.
  void validate() const;
};

// Reads [distribution] and [type_weights] sections from INI text.
DistributionTarget parse_target(std::string_view ini_text);
DistributionTarget load_target_file(const std::string& path);
// Built-in presets by name; only "reference-2024" exists.
DistributionTarget preset(std::string_view name);
std::vector<std::string> preset_names();

struct ComposeContext {
  std::uint64_t dataset_seed = 0;
  CompatibilityPolicy policy = CompatibilityPolicy::defaults();
  text::TextContext text;
  client::ModelClient* llm = nullptr;  // LLM-guided types are skipped without one
  int max_attempts = 8;                // redraws of a rule-based type on overlap
  int llm_redraws = 2;                 // redraws of an LLM-guided type on overlap
  int llm_attempts = 3;                // requests per LLM redraw
};

struct ComposeResult {
  ParsingCase parsing_case;
  std::vector<std::string> dropped;  // "type: reason"
};

// Builds one case. `types` must be valid for the record's element and
// pairwise compatible. Types that cannot be applied without touching an
// earlier receipt are dropped; if every requested type is dropped the call
// throws PreconditionError("infeasible case").
ComposeResult compose_case(const ElementRecord& record, const std::vector<std::string>& types,
                           const std::string& case_id, const ComposeContext& ctx);

// Canonical application order rank of a type (lower applies first).
int order_rank(const ErrorType& type);

// Rebuilds the prediction from the ground truth and the trace. Text and
// equation steps use their splices; table steps re-run the rule with the
// recorded seed, or take the recorded output of an LLM-guided step.
std::string replay(const ParsingCase& c);

// Types whose dry run succeeds on the record.
std::vector<std::string> applicable_types(const ElementRecord& record, const ComposeContext& ctx);

struct PlanItem {
  std::string case_id;
  std::string record_id;
  std::vector<std::string> types;
};

// Draws `n` plans. Category counts follow the target fractions by largest
// remainder; types follow per_type_weights over the types each record
// supports. Throws ValidationError("infeasible target") when a category with
// a positive quota has no eligible record.
std::vector<PlanItem> sample_plan(const std::vector<ElementRecord>& records, const DistributionTarget& target,
                                  std::size_t n, Rng& rng, const ComposeContext& ctx);

// Same, with applicability already computed (index-aligned with records).
std::vector<PlanItem> sample_plan(const std::vector<ElementRecord>& records,
                                  const std::vector<std::vector<std::string>>& applicable,
                                  const DistributionTarget& target, std::size_t n, Rng& rng,
                                  const CompatibilityPolicy& policy = CompatibilityPolicy::defaults());

struct PipelineResult {
  std::vector<ParsingCase> cases;
  std::vector<std::string> log;  // degradations and skipped plans
};

// Samples plans and materializes them on `workers` threads. Output order is
// plan order. A plan whose applied count leaves its category is redrawn for
// the same record up to five times before being kept as is.
PipelineResult run_pipeline(const std::vector<ElementRecord>& records, const DistributionTarget& target, std::size_t n,
                            const ComposeContext& ctx, unsigned workers);

// Donor pool for text_redundancy: every text record of the corpus.
std::vector<text::Donor> donor_pool(const std::vector<ElementRecord>& records);

}  // namespace docinspect::compose
