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

#include "docinspect/config.hpp"

#include <charconv>
#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "docinspect/digest.hpp"
#include "docinspect/error.hpp"
#include "docinspect/unicode.hpp"

extern char** environ;

namespace docinspect {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"synthesis", {"dataset_seed"}},
      {"paths", {"records", "cases", "outputs"}},
      {"distribution", {"preset", "target_file"}},
      {"policy", {"max_errors_per_case", "min_errors_per_multicase", "forbid"}},
      {"rules",
       {"short_text_threshold", "min_inline_tokens", "title_hashes_min", "title_hashes_max", "newline_insert_min",
        "newline_insert_max", "repetition_min", "repetition_max", "cjk_delete_min", "cjk_delete_max",
        "word_delete_min", "word_delete_max", "latin_char_delete_min", "latin_char_delete_max", "space_edit_min",
        "space_edit_max", "donor_fragment_max"}},
      {"workers", {"default", "compose", "judge", "synth"}},
      {"client", {"endpoint", "model", "auth_env", "temperature", "max_tokens", "max_retries", "timeout_seconds",
                  "max_concurrency"}},
  };
  return s;
}

bool looks_secret(const std::string& key) {
  for (const char* word : {"key", "token", "secret", "password"}) {
    if (key.find(word) != std::string::npos && key != "max_tokens") return true;
  }
  return false;
}

void check_key(const std::string& section, const std::string& key) {
  const std::string family = section.rfind("client.", 0) == 0 ? "client" : section;
  if (family == "client" && section.size() <= 7) throw ValidationError("client section needs a name");
  auto it = schema().find(family);
  if (it == schema().end()) throw ValidationError("unknown config section '" + section + "'");
  if (!it->second.count(key)) {
    if (family == "client" && looks_secret(key)) {
      throw ValidationError("config key '" + section + "." + key +
                            "' looks like a credential; name its environment variable with auth_env instead");
    }
    throw ValidationError("unknown config key '" + section + "." + key + "'");
  }
}

template <typename T>
T parse_int(const std::string& name, const std::string& raw) {
  const std::string v = unicode::trim(raw);
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ValidationError("config '" + name + "': not an integer: " + v);
  return out;
}

double parse_real(const std::string& name, const std::string& raw) {
  const std::string v = unicode::trim(raw);
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ValidationError("config '" + name + "': not a number: " + v);
  return out;
}

void apply_rule(text::TextRuleParams& p, const std::string& key, const std::string& name, const std::string& v) {
  std::map<std::string, int*> ints = {
      {"title_hashes_min", &p.title_hashes_min},         {"title_hashes_max", &p.title_hashes_max},
      {"newline_insert_min", &p.newline_insert_min},     {"newline_insert_max", &p.newline_insert_max},
      {"repetition_min", &p.repetition_min},             {"repetition_max", &p.repetition_max},
      {"cjk_delete_min", &p.cjk_delete_min},             {"cjk_delete_max", &p.cjk_delete_max},
      {"word_delete_min", &p.word_delete_min},           {"word_delete_max", &p.word_delete_max},
      {"latin_char_delete_min", &p.latin_char_delete_min}, {"latin_char_delete_max", &p.latin_char_delete_max},
      {"space_edit_min", &p.space_edit_min},             {"space_edit_max", &p.space_edit_max},
  };
  if (auto it = ints.find(key); it != ints.end()) {
    *it->second = parse_int<int>(name, v);
    if (*it->second < 1) throw ValidationError("config '" + name + "' must be at least 1");
  } else if (key == "short_text_threshold") {
    p.short_text_threshold = parse_int<std::size_t>(name, v);
  } else if (key == "min_inline_tokens") {
    p.min_inline_tokens = parse_int<std::size_t>(name, v);
  } else if (key == "donor_fragment_max") {
    p.donor_fragment_max = parse_int<std::size_t>(name, v);
  }
}

void check_ranges(const text::TextRuleParams& p) {
  const std::pair<const char*, std::pair<int, int>> ranges[] = {
      {"title_hashes", {p.title_hashes_min, p.title_hashes_max}},
      {"newline_insert", {p.newline_insert_min, p.newline_insert_max}},
      {"repetition", {p.repetition_min, p.repetition_max}},
      {"cjk_delete", {p.cjk_delete_min, p.cjk_delete_max}},
      {"word_delete", {p.word_delete_min, p.word_delete_max}},
      {"latin_char_delete", {p.latin_char_delete_min, p.latin_char_delete_max}},
      {"space_edit", {p.space_edit_min, p.space_edit_max}},
  };
  for (const auto& [name, r] : ranges) {
    if (r.first > r.second) throw ValidationError(std::string("config rules.") + name + "_min exceeds its maximum");
  }
}

}  // namespace

std::map<std::string, std::string> environment_overrides() {
  std::map<std::string, std::string> out;
  const std::string prefix = "DOCINSPECT_";
  for (char** e = environ; e && *e; ++e) {
    const std::string entry = *e;
    if (entry.rfind(prefix, 0) != 0) continue;
    const auto eq = entry.find('=');
    const std::string name = entry.substr(prefix.size(), eq - prefix.size());
    const auto sep = name.find("__");
    if (sep == std::string::npos) continue;
    std::string section = unicode::ascii_lower(name.substr(0, sep));
    if (section.rfind("client_", 0) == 0) section = "client." + section.substr(7);
    out[section + "." + unicode::ascii_lower(name.substr(sep + 2))] = entry.substr(eq + 1);
  }
  return out;
}

GlobalConfig parse_config(std::string_view ini_text, const std::map<std::string, std::string>& env) {
  pt::ptree tree;
  std::istringstream in{std::string(ini_text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  GlobalConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw ValidationError("config key '" + section + "' outside a section");
    for (const auto& [key, value] : body) {
      check_key(section, key);
      c.values[section + "." + key] = unicode::trim(value.get_value<std::string>());
    }
  }
  for (const auto& [name, value] : env) {
    const auto dot = name.rfind('.');
    if (dot == std::string::npos) throw ValidationError("bad override '" + name + "'");
    check_key(name.substr(0, dot), name.substr(dot + 1));
    c.values[name] = unicode::trim(value);
  }

  for (const auto& [name, v] : c.values) {
    const auto dot = name.rfind('.');
    const std::string section = name.substr(0, dot), key = name.substr(dot + 1);
    if (name == "synthesis.dataset_seed") {
      c.dataset_seed = parse_int<std::uint64_t>(name, v);
    } else if (name == "paths.records") {
      c.records_path = v;
    } else if (name == "paths.cases") {
      c.cases_path = v;
    } else if (name == "paths.outputs") {
      c.outputs_dir = v;
    } else if (name == "distribution.preset") {
      c.distribution_preset = v;
    } else if (name == "distribution.target_file") {
      c.target_file = v;
    } else if (name == "policy.max_errors_per_case") {
      c.policy.max_errors_per_case = parse_int<int>(name, v);
    } else if (name == "policy.min_errors_per_multicase") {
      c.policy.min_errors_per_multicase = parse_int<int>(name, v);
    } else if (name == "policy.forbid") {
      std::stringstream ss(v);
      std::string pair;
      while (std::getline(ss, pair, ',')) {
        const auto bar = pair.find('|');
        if (bar == std::string::npos) throw ValidationError("config policy.forbid entry '" + pair + "' lacks '|'");
        const std::string a = unicode::trim(pair.substr(0, bar)), b = unicode::trim(pair.substr(bar + 1));
        Taxonomy::builtin().at(a);
        Taxonomy::builtin().at(b);
        c.policy.forbid(a, b);
      }
    } else if (section == "rules") {
      apply_rule(c.text_rules, key, name, v);
    } else if (section == "workers") {
      c.workers[key] = parse_int<unsigned>(name, v);
      if (c.workers[key] == 0) throw ValidationError("config '" + name + "' must be at least 1");
    } else if (section.rfind("client.", 0) == 0) {
      auto& p = c.clients[section.substr(7)];
      p.name = section.substr(7);
      if (key == "endpoint") p.endpoint = v;
      else if (key == "model") p.model = v;
      else if (key == "auth_env") p.auth_env = v;
      else if (key == "temperature") p.temperature = parse_real(name, v);
      else if (key == "max_tokens") p.max_tokens = parse_int<int>(name, v);
      else if (key == "max_retries") p.max_retries = parse_int<int>(name, v);
      else if (key == "timeout_seconds") p.timeout_seconds = parse_real(name, v);
      else if (key == "max_concurrency") p.max_concurrency = parse_int<int>(name, v);
    }
  }
  if (c.policy.max_errors_per_case < 1 || c.policy.min_errors_per_multicase < 2 ||
      c.policy.min_errors_per_multicase > c.policy.max_errors_per_case) {
    throw ValidationError("config policy bounds are inconsistent");
  }
  check_ranges(c.text_rules);
  for (const auto& [name, p] : c.clients) p.validate();
  return c;
}

GlobalConfig load_config(const std::string& path) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse_config(text, environment_overrides());
}

std::uint64_t GlobalConfig::require_seed() const {
  if (!dataset_seed) throw ValidationError("dataset_seed is required ([synthesis] dataset_seed or --seed)");
  return *dataset_seed;
}

unsigned GlobalConfig::workers_for(std::string_view subcommand) const {
  if (auto it = workers.find(std::string(subcommand)); it != workers.end()) return it->second;
  if (auto it = workers.find("default"); it != workers.end()) return it->second;
  return std::max(1u, std::thread::hardware_concurrency());
}

compose::DistributionTarget GlobalConfig::target() const {
  if (!target_file.empty()) return compose::load_target_file(target_file);
  return compose::preset(distribution_preset);
}

const client::ClientProfile& GlobalConfig::client(std::string_view name) const {
  auto it = clients.find(std::string(name));
  if (it == clients.end()) throw ValidationError("no client profile '" + std::string(name) + "' in the config");
  return it->second;
}

std::string GlobalConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values) out += k + "=" + v + "\n";
  return out;
}

std::string GlobalConfig::hash() const { return sha256_hex(canonical()); }

}  // namespace docinspect
