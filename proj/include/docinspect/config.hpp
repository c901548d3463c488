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
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "docinspect/composer.hpp"
#include "docinspect/modelclient.hpp"
#include "docinspect/perturb_text.hpp"
#include "docinspect/taxonomy.hpp"

namespace docinspect {

// INI configuration shared by every subcommand.
//
//   [synthesis]    dataset_seed
//   [paths]        records, cases, outputs
//   [distribution] preset, target_file
//   [policy]       max_errors_per_case, min_errors_per_multicase, forbid = a|b, c|d
//   [rules]        any TextRuleParams field by name
//   [workers]      default, compose, judge, synth
//   [client.NAME]  endpoint, model, auth_env, temperature, max_tokens,
//                  max_retries, timeout_seconds, max_concurrency
//
// Environment variables DOCINSPECT_<SECTION>__<KEY> override file values;
// a client section is written CLIENT_<NAME>. Credentials are never read from
// the file: a client names the environment variable holding its token.
struct GlobalConfig {
  std::map<std::string, std::string> values;  // "section.key" -> raw value, after overrides

  std::optional<std::uint64_t> dataset_seed;
  std::string records_path;
  std::string cases_path;
  std::string outputs_dir;
  std::string distribution_preset = "reference-2024";
  std::string target_file;
  CompatibilityPolicy policy = CompatibilityPolicy::defaults();
  text::TextRuleParams text_rules;
  std::map<std::string, unsigned> workers;  // "default", "compose", "judge", "synth"
  std::map<std::string, client::ClientProfile> clients;

  // Throws ValidationError("dataset_seed is required") when absent.
  std::uint64_t require_seed() const;
  unsigned workers_for(std::string_view subcommand) const;
  compose::DistributionTarget target() const;
  const client::ClientProfile& client(std::string_view name) const;

  // One "section.key=value" line per setting, sorted.
  std::string canonical() const;
  // SHA-256 of canonical().
  std::string hash() const;
};

GlobalConfig parse_config(std::string_view ini_text, const std::map<std::string, std::string>& env = {});
// Reads `path` (empty means defaults only) and applies overrides from the
// process environment.
GlobalConfig load_config(const std::string& path);
std::map<std::string, std::string> environment_overrides();

}  // namespace docinspect
