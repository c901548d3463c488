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

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "docinspect/cocl.hpp"
#include "docinspect/modelclient.hpp"

namespace docinspect::fixtures {

// Profile used by replay fixtures and by the CLI when no profile is named.
client::ClientProfile replay_profile();

// Offline stand-in for a chat model. It recognizes the synthesis, filter and
// judge prompts by their rendered frame and answers deterministically from
// the request seed: synthesis answers apply a plausible edit of the requested
// kind (the formula kernel for equations), the filter compares grids, and the
// judge reports the errors returned by the oracle with a little seeded noise.
class SimulatedLlm : public client::ModelClient {
 public:
  using JudgeOracle = std::function<std::optional<std::set<std::string>>(const std::string& prediction)>;

  explicit SimulatedLlm(client::ClientProfile profile = replay_profile());

  client::ChatResponse complete(const client::ChatRequest& request) override;
  const client::ClientProfile& profile() const override { return profile_; }

  void set_judge_oracle(JudgeOracle oracle) { oracle_ = std::move(oracle); }
  // Probability-free noise switch for the judge (on by default).
  void set_judge_noise(bool on) { noise_ = on; }
  std::size_t calls() const { return calls_.load(); }

  // Answer for a synthesis request, exposed for tests.
  static std::string synthesize(const std::string& error_type, const std::string& input, std::uint64_t seed);

 private:
  struct Pattern {
    enum Kind { Synth, Filter, Judge } kind;
    std::string error_type;
    cocl::PromptPreset preset = cocl::PromptPreset::Cocl;
    std::vector<std::string> pieces;  // text around the inserted values
  };
  std::string judge(const std::string& prediction, cocl::PromptPreset preset) const;

  client::ClientProfile profile_;
  std::vector<Pattern> patterns_;
  JudgeOracle oracle_;
  bool noise_ = true;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace docinspect::fixtures
