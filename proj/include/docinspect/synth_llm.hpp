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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "docinspect/corpus.hpp"
#include "docinspect/error.hpp"
#include "docinspect/modelclient.hpp"
#include "docinspect/receipt.hpp"
#include "docinspect/rng.hpp"

namespace docinspect::synth {

// The response had no "Final ..." block (or no "[Result]" for the filter).
class UnparseableResponse : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The payload does not carry the requested error: it equals the input, or
// fails the element's intent check.
class UnsoundResponse : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Renders the prompt template of an LLM-guided or real-world type. `input` is
// the text, table HTML or formula to modify; `candidate` is only used by the
// corruption filter. Throws ValidationError for rule-based types, empty
// input, or placeholders left unresolved.
std::string render_prompt(std::string_view error_type, std::string_view input, std::string_view candidate = "");
std::string render_prompt(std::string_view error_type, const ElementRecord& record);

struct SynthesisResponse {
  std::string raw;
  std::string final_payload;
  std::optional<std::string> modification_details;
};

// Extracts the last "Final Text/Table/formula:" block and runs the intent
// check for the type. When `original` is given, a payload equal to it under
// canonical normalization is also unsound.
SynthesisResponse parse_response(std::string_view error_type, std::string_view raw,
                                 std::optional<std::string_view> original = std::nullopt);

enum class FilterVerdict { BadTable, GoodTable, UnableToJudge };
std::string_view to_string(FilterVerdict v);
// Reads the last "[Result]" line. Throws UnparseableResponse without one.
FilterVerdict parse_filter_verdict(std::string_view raw);

struct FilterOutcome {
  std::string candidate;
  std::optional<FilterVerdict> verdict;
  bool selected = false;
  std::string reason;
};

// Keeps candidates the filter labels "Bad Table". Candidates equal to the
// ground truth are discarded without a request; client failures skip the
// candidate with the reason recorded.
std::vector<FilterOutcome> filter_corruption(const ElementRecord& record, const std::vector<std::string>& candidates,
                                             client::ModelClient& client);

struct LlmPerturbation {
  std::string output;
  PerturbationReceipt receipt;
};

// One LLM-guided perturbation with up to `max_attempts` requests. Each
// attempt uses a distinct request seed so that a retry is a new sample.
// Throws PreconditionError once every attempt was unsound or failed.
class LlmInjector {
 public:
  explicit LlmInjector(client::ModelClient& client, int max_attempts = 3) : client_(client), max_attempts_(max_attempts) {}

  LlmPerturbation apply(std::string_view error_type, std::string_view input, std::uint64_t seed);

 private:
  client::ModelClient& client_;
  int max_attempts_;
};

// Splice covering the changed stretch between `before` and `after`, aligned
// to grapheme boundaries of `before`.
Splice diff_splice(std::u32string_view before, std::u32string_view after);

}  // namespace docinspect::synth
