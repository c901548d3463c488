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

#include "docinspect/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "docinspect/cocl.hpp"
#include "docinspect/composer.hpp"
#include "docinspect/config.hpp"
#include "docinspect/corpus.hpp"
#include "docinspect/error.hpp"
#include "docinspect/latex.hpp"
#include "docinspect/metrics.hpp"
#include "docinspect/modelclient.hpp"
#include "docinspect/objective.hpp"
#include "docinspect/refine.hpp"
#include "docinspect/reward.hpp"
#include "docinspect/synth_llm.hpp"
#include "docinspect/taxonomy.hpp"

namespace docinspect::cli {

namespace {

namespace fs = std::filesystem;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  const Hooks& hooks;
};

// Input path or "-" for the standard input.
class Input {
 public:
  Input(const std::string& path, std::istream& stdin_stream) {
    if (path == "-") {
      stream_ = &stdin_stream;
    } else {
      file_.open(path);
      if (!file_) throw IoError("cannot open '" + path + "'");
      stream_ = &file_;
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_ = nullptr;
};

// --out path, or the data stream when empty or "-". Files are written to a
// temporary name and renamed on commit so a failed run leaves no partial file.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path == "-" ? "" : path) {
    if (path_.empty()) {
      stream_ = &fallback;
    } else {
      tmp_ = path_ + ".tmp";
      file_.open(tmp_, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot write '" + path_ + "'");
      stream_ = &file_;
    }
  }
  ~Output() {
    if (!committed_ && !tmp_.empty()) {
      file_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }
  std::ostream& get() { return *stream_; }
  void commit() {
    if (tmp_.empty()) {
      stream_->flush();
      return;
    }
    file_.close();
    if (!file_) throw IoError("write failed for '" + path_ + "'");
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_, tmp_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
  bool committed_ = false;
};

struct Global {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  GlobalConfig load() const {
    GlobalConfig c = load_config(config_path);
    if (seed) {
      c.dataset_seed = seed;
      c.values["synthesis.dataset_seed"] = std::to_string(*seed);
    }
    return c;
  }
};

struct ClientOptions {
  std::string name;
  std::string replay_dir;
  std::string record_dir;
};

void add_client_options(CLI::App* app, ClientOptions& o) {
  app->add_option("--client", o.name, "client profile name from the config");
  app->add_option("--replay", o.replay_dir, "answer requests from a transcript directory (no network)");
  app->add_option("--record", o.record_dir, "write a transcript of every request to this directory");
}

// Owns the client chain built from the options.
struct ClientChain {
  std::unique_ptr<client::ModelClient> base;
  std::unique_ptr<client::ModelClient> recorder;
  client::ModelClient& get() { return recorder ? *recorder : *base; }
};

ClientChain make_client(const GlobalConfig& config, const ClientOptions& o, const Hooks& hooks) {
  client::ClientProfile profile;
  if (!o.name.empty()) {
    profile = config.client(o.name);
  } else if (!o.replay_dir.empty() || hooks.client_factory) {
    profile.name = "replay";
    profile.model = "replay";
  } else {
    throw ValidationError("a model client is required: pass --client <profile> or --replay <dir>");
  }
  ClientChain chain;
  if (!o.replay_dir.empty()) {
    chain.base = std::make_unique<client::ReplayClient>(profile, o.replay_dir);
  } else if (hooks.client_factory) {
    chain.base = hooks.client_factory(profile);
  } else {
    profile.validate();
    chain.base = std::make_unique<client::ChatCompletionsClient>(profile, client::make_http_transport());
  }
  if (!o.record_dir.empty()) chain.recorder = std::make_unique<client::RecordingClient>(*chain.base, o.record_dir);
  return chain;
}

std::vector<ElementRecord> read_records_arg(const std::string& path, std::istream& in) {
  Input input(path, in);
  return read_records(input.get());
}

std::vector<ParsingCase> read_cases_arg(const std::string& path, std::istream& in) {
  Input input(path, in);
  return read_cases(input.get());
}

std::vector<cocl::JudgeRecord> read_judgments_arg(const std::string& path, std::istream& in) {
  Input input(path, in);
  return cocl::read_judge_records(input.get());
}

template <typename F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) fn(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- taxonomy

int cmd_taxonomy_list(const std::string& element, bool json, Streams s) {
  std::optional<ElementKind> filter;
  if (!element.empty()) filter = parse_element(element);
  const auto types = Taxonomy::builtin().types_of(filter);
  if (json) {
    OrderedJson arr = OrderedJson::array();
    for (const ErrorType* t : types) {
      OrderedJson j;
      j["id"] = t->id;
      j["element"] = std::string(to_string(t->element));
      j["level"] = t->level;
      j["level_name"] = t->level_name;
      j["display_name"] = t->display_name;
      j["synthesis_mode"] = std::string(to_string(t->synthesis_mode));
      j["exclusivity_class"] = std::string(to_string(t->exclusivity));
      j["definition"] = t->definition;
      arr.push_back(std::move(j));
    }
    s.out << arr.dump(2) << '\n';
  } else {
    for (const ErrorType* t : types) {
      s.out << t->id << '\t' << to_string(t->element) << '\t' << t->level << '\t' << to_string(t->synthesis_mode)
            << '\t' << t->display_name << '\n';
    }
  }
  return 0;
}

int cmd_taxonomy_levels(const std::string& element, bool json, Streams s) {
  std::optional<ElementKind> filter;
  if (!element.empty()) filter = parse_element(element);
  const auto levels = Taxonomy::builtin().levels(filter);
  if (json) {
    OrderedJson arr = OrderedJson::array();
    for (const auto& l : levels) arr.push_back({{"id", l.id}, {"element", std::string(to_string(l.element))}, {"name", l.name}});
    s.out << arr.dump(2) << '\n';
  } else {
    for (const auto& l : levels) s.out << l.id << '\t' << to_string(l.element) << '\t' << l.name << '\n';
  }
  return 0;
}

// ------------------------------------------------------------------ corpus

int cmd_corpus_stats(const std::string& path, bool json, Streams s) {
  const auto stats = compute_stats(read_cases_arg(path, s.in));
  if (json) {
    s.out << to_json(stats).dump() << '\n';
    return 0;
  }
  char buf[64];
  s.out << "total\t" << stats.total << '\n';
  std::snprintf(buf, sizeof buf, "%.2f%%", 100 * stats.good_fraction);
  s.out << "good\t" << stats.good << '\t' << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.2f%%", 100 * stats.single_error_fraction);
  s.out << "single\t" << stats.single_error << '\t' << buf << '\n';
  std::snprintf(buf, sizeof buf, "%.2f%%", 100 * stats.multi_error_fraction);
  s.out << "multi\t" << stats.multi_error << '\t' << buf << '\n';
  for (const auto& [e, n] : stats.per_element) s.out << "element." << e << '\t' << n << '\n';
  for (const auto& [k, n] : stats.per_error_count) s.out << "errors." << k << '\t' << n << '\n';
  for (const auto& [t, n] : stats.per_error_type) s.out << "type." << t << '\t' << n << '\n';
  return 0;
}

int cmd_corpus_validate(const std::string& path, bool records, Streams s) {
  std::vector<std::string> problems;
  std::size_t n = 0;
  if (records) {
    const auto rs = read_records_arg(path, s.in);
    n = rs.size();
    std::set<std::string> seen;
    for (const auto& r : rs) {
      if (!seen.insert(r.id).second) problems.push_back(r.id + ": duplicate id");
      for (const auto& p : validate_record(r)) problems.push_back(r.id + ": " + p);
    }
  } else {
    const auto cs = read_cases_arg(path, s.in);
    n = cs.size();
    problems = validate_cases(cs);
  }
  for (const auto& p : problems) s.err << p << '\n';
  s.out << (problems.empty() ? "ok" : "invalid") << '\t' << n << '\t' << problems.size() << '\n';
  return problems.empty() ? 0 : 1;
}

// ------------------------------------------------------------------- synth

struct SynthOptions {
  std::string error;
  std::string records;
  std::string out;
  std::string candidates;
  ClientOptions client;
};

int synth_single(const SynthOptions& o, const Global& g, Streams s, ElementKind expect, bool llm) {
  const GlobalConfig config = g.load();
  const ErrorType& type = Taxonomy::builtin().at(o.error);
  if (!llm && (type.element != expect || type.synthesis_mode != SynthesisMode::RuleBased)) {
    throw ValidationError("'" + o.error + "' is not a rule-based " + std::string(to_string(expect)) + " type");
  }
  if (llm && type.synthesis_mode == SynthesisMode::RuleBased) {
    throw ValidationError("'" + o.error + "' is rule-based; use synth " + std::string(to_string(type.element)));
  }
  const auto records = read_records_arg(o.records, s.in);
  compose::ComposeContext ctx;
  ctx.dataset_seed = config.require_seed();
  ctx.policy = config.policy;
  ctx.text.params = config.text_rules;
  ctx.text.donor_pool = compose::donor_pool(records);
  ctx.llm_redraws = 1;
  std::optional<ClientChain> chain;
  if (llm) {
    chain = make_client(config, o.client, s.hooks);
    ctx.llm = &chain->get();
  }

  std::vector<std::optional<ParsingCase>> results(records.size());
  std::vector<std::string> notes(records.size());
  const unsigned workers = llm ? static_cast<unsigned>(std::max(1, ctx.llm->profile().max_concurrency))
                               : config.workers_for("synth");
  parallel_for(records.size(), workers, [&](std::size_t i) {
    const auto& r = records[i];
    if (r.element != type.element) return;
    try {
      results[i] = compose::compose_case(r, {type.id}, r.id + "/" + type.id, ctx).parsing_case;
    } catch (const PreconditionError& e) {
      notes[i] = r.id + ": skipped: " + e.what();
    }
  });
  Output out(o.out, s.out);
  write_header(out.get(), default_header(config.hash(), ctx.dataset_seed));
  std::size_t written = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!notes[i].empty()) s.err << notes[i] << '\n';
    if (results[i]) {
      write_cases({*results[i]}, out.get());
      ++written;
    }
  }
  out.commit();
  s.err << "wrote " << written << " cases\n";
  return 0;
}

int synth_corruption(const SynthOptions& o, const Global& g, Streams s) {
  if (o.candidates.empty()) throw ValidationError("table_recognition_corruption needs --candidates");
  const GlobalConfig config = g.load();
  const std::uint64_t seed = config.dataset_seed.value_or(0);
  const auto records = read_records_arg(o.records, s.in);
  std::map<std::string, const ElementRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::map<std::string, std::vector<std::string>> candidates;
  std::vector<std::string> order;
  {
    Input input(o.candidates, s.in);
    for_each_json_line(input.get(), [&](const Json& j, std::size_t line) {
      if (!j.contains("record_id") || !j.contains("prediction")) {
        throw ValidationError("line " + std::to_string(line) + ": candidate needs record_id and prediction");
      }
      const std::string id = j.at("record_id").get<std::string>();
      if (!by_id.count(id)) throw ValidationError("line " + std::to_string(line) + ": unknown record '" + id + "'");
      if (!candidates.count(id)) order.push_back(id);
      candidates[id].push_back(j.at("prediction").get<std::string>());
    });
  }
  ClientChain chain = make_client(config, o.client, s.hooks);
  Output out(o.out, s.out);
  write_header(out.get(), default_header(config.hash(), seed));
  std::size_t written = 0;
  for (const auto& id : order) {
    const ElementRecord& r = *by_id.at(id);
    if (r.element != ElementKind::Table) throw ValidationError("record '" + id + "' is not a table");
    const auto outcomes = synth::filter_corruption(r, candidates.at(id), chain.get());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& oc = outcomes[i];
      if (!oc.selected) {
        s.err << id << " candidate " << i << ": discarded: " << oc.reason << '\n';
        continue;
      }
      ParsingCase c;
      c.id = id + "/corruption-" + std::to_string(i);
      c.element_record_id = id;
      c.element = ElementKind::Table;
      c.image_ref = r.image_ref;
      c.ground_truth = r.ground_truth;
      c.prediction = oc.candidate;
      c.gold_errors = {"table_recognition_corruption"};
      c.provenance = Provenance::RealWorld;
      PerturbationReceipt receipt;
      receipt.error_type = "table_recognition_corruption";
      receipt.parameters = {{"filter_verdict", std::string(synth::to_string(*oc.verdict))},
                            {"candidate_index", std::to_string(i)},
                            {"output_html", oc.candidate}};
      c.synthesis_trace.push_back(std::move(receipt));
      write_cases({c}, out.get());
      ++written;
    }
  }
  out.commit();
  s.err << "wrote " << written << " cases\n";
  return 0;
}

// ----------------------------------------------------------------- compose

struct ComposeOptions {
  std::string target;
  std::string records;
  std::string out;
  std::string log;
  std::size_t n = 0;
  ClientOptions client;
  bool plan_only = false;
};

int cmd_compose(const ComposeOptions& o, const Global& g, Streams s) {
  GlobalConfig config = g.load();
  compose::DistributionTarget target;
  if (o.target.empty()) target = config.target();
  else if (fs::exists(o.target)) target = compose::load_target_file(o.target);
  else target = compose::preset(o.target);

  const auto records = read_records_arg(o.records, s.in);
  compose::ComposeContext ctx;
  ctx.dataset_seed = config.require_seed();
  ctx.policy = config.policy;
  ctx.text.params = config.text_rules;
  std::optional<ClientChain> chain;
  if (!o.client.name.empty() || !o.client.replay_dir.empty() || s.hooks.client_factory) {
    chain = make_client(config, o.client, s.hooks);
    ctx.llm = &chain->get();
  }
  const std::size_t n = o.n ? o.n : records.size();
  const OutputHeader header = default_header(config.hash(), ctx.dataset_seed);

  if (o.plan_only) {
    ctx.text.donor_pool = compose::donor_pool(records);
    Rng rng(derive_seed(ctx.dataset_seed, "plan", "sample_plan"));
    const auto plans = compose::sample_plan(records, target, n, rng, ctx);
    Output out(o.out, s.out);
    write_header(out.get(), header);
    for (const auto& p : plans) {
      OrderedJson j;
      j["case_id"] = p.case_id;
      j["record_id"] = p.record_id;
      j["types"] = p.types;
      out.get() << j.dump() << '\n';
    }
    out.commit();
    return 0;
  }
  const auto result = compose::run_pipeline(records, target, n, ctx, config.workers_for("compose"));
  if (!o.log.empty()) {
    Output log(o.log, s.err);
    for (const auto& l : result.log) log.get() << l << '\n';
    log.commit();
  } else {
    for (const auto& l : result.log) s.err << l << '\n';
  }
  Output out(o.out, s.out);
  write_header(out.get(), header);
  write_cases(result.cases, out.get());
  out.commit();
  s.err << "wrote " << result.cases.size() << " cases\n";
  return 0;
}

// -------------------------------------------------------------------- cocl

int cmd_cocl_render(const std::string& cases, const std::string& element, const std::string& input,
                    const std::string& preset_name, const std::string& out_path, Streams s) {
  const auto preset = cocl::parse_prompt_preset(preset_name);
  Output out(out_path, s.out);
  if (!cases.empty()) {
    for (const auto& c : read_cases_arg(cases, s.in)) {
      OrderedJson j;
      j["case_id"] = c.id;
      j["prompt"] = cocl::render_judge_prompt(c.element, c.prediction, preset);
      out.get() << j.dump() << '\n';
    }
  } else {
    if (element.empty()) throw ValidationError("cocl render needs --cases or --element");
    Input in(input, s.in);
    std::stringstream ss;
    ss << in.get().rdbuf();
    out.get() << cocl::render_judge_prompt(parse_element(element), ss.str(), preset) << '\n';
  }
  out.commit();
  return 0;
}

int cmd_cocl_parse(const std::string& path, bool raw, const std::string& out_path, Streams s) {
  Output out(out_path, s.out);
  if (raw) {
    Input in(path, s.in);
    std::stringstream ss;
    ss << in.get().rdbuf();
    cocl::JudgeRecord r{"", 0, cocl::parse_judge_output(ss.str())};
    out.get() << cocl::to_json(r).dump() << '\n';
  } else {
    for (const auto& r : read_judgments_arg(path, s.in)) out.get() << cocl::to_json(r).dump() << '\n';
  }
  out.commit();
  return 0;
}

// ------------------------------------------------------------------- judge

struct JudgeOptions {
  std::string cases;
  std::string out;
  std::string preset = "cocl";
  std::string image_dir;
  int k = 1;
  ClientOptions client;
};

int cmd_judge_run(const JudgeOptions& o, const Global& g, Streams s) {
  if (o.out.empty() || o.out == "-") throw ValidationError("judge run needs --out <file> (the run is resumable)");
  if (o.k < 1) throw ValidationError("--k must be at least 1");
  const GlobalConfig config = g.load();
  const auto cases = read_cases_arg(o.cases, s.in);
  const auto preset = cocl::parse_prompt_preset(o.preset);
  ClientChain chain = make_client(config, o.client, s.hooks);
  const std::string image_dir = o.image_dir;
  client::PromptBuilder builder = [preset, image_dir](const ParsingCase& c, int sample) {
    client::ChatRequest req;
    req.user = cocl::render_judge_prompt(c.element, c.prediction, preset);
    if (!c.image_ref.empty()) req.image = client::load_image(c.image_ref, image_dir);
    req.seed = client::sample_seed(c.id, sample);
    return req;
  };
  client::JudgeRunOptions options;
  options.k = o.k;
  options.max_concurrency = static_cast<int>(
      std::min<unsigned>(config.workers_for("judge"), static_cast<unsigned>(chain.get().profile().max_concurrency)));
  options.image_base_dir = o.image_dir;
  const auto summary = client::run_judge(chain.get(), cases, builder, options, o.out,
                                         default_header(config.hash(), config.dataset_seed.value_or(0)));
  s.err << "written " << summary.written << ", already present " << summary.skipped << ", failed " << summary.failed
        << '\n';
  return summary.failed ? 2 : 0;
}

// ------------------------------------------------------------ score/reward

struct ScoreOptions {
  std::string gold;
  std::string pred;
  std::string element;
  std::string out;
  std::size_t k = 1;
  bool json = false;
  bool table = false;
  bool best_of_k = false;
};

int cmd_score(const ScoreOptions& o, Streams s) {
  if (o.k < 1) throw ValidationError("--k must be at least 1");
  auto judgments = metrics::join(read_cases_arg(o.gold, s.in), read_judgments_arg(o.pred, s.in));
  if (!o.element.empty()) {
    const ElementKind e = parse_element(o.element);
    std::erase_if(judgments, [e](const metrics::CaseJudgment& j) { return j.element != e; });
  }
  const auto report =
      metrics::build_report(judgments, o.k, o.best_of_k ? metrics::PassMode::BestOfK : metrics::PassMode::Union);
  Output out(o.out, s.out);
  if (o.json) out.get() << metrics::to_json(report).dump() << '\n';
  else out.get() << metrics::render_table(report);
  out.commit();
  return 0;
}

struct RewardCliOptions {
  std::string gold;
  std::string pred;
  std::string scheme = "asymmetric";
  std::string out;
  bool graded_format = false;
  double w_format = 1, w_recall = 1, w_precision = 1;
};

int cmd_reward(const RewardCliOptions& o, Streams s) {
  if (o.scheme != "asymmetric" && o.scheme != "f1") throw ValidationError("unknown reward scheme '" + o.scheme + "'");
  const auto cases = read_cases_arg(o.gold, s.in);
  std::map<std::string, const ParsingCase*> by_id;
  for (const auto& c : cases) by_id[c.id] = &c;
  reward::RewardOptions options;
  options.graded_format = o.graded_format;
  options.w_format = o.w_format;
  options.w_recall = o.w_recall;
  options.w_precision = o.w_precision;
  Output out(o.out, s.out);
  for (const auto& r : read_judgments_arg(o.pred, s.in)) {
    auto it = by_id.find(r.case_id);
    if (it == by_id.end()) throw ValidationError("judgment for unknown case '" + r.case_id + "'");
    const auto score = o.scheme == "f1" ? reward::f1_reward(it->second->gold_errors, r.output, options)
                                        : reward::asymmetric_reward(it->second->gold_errors, r.output, options);
    OrderedJson j;
    j["case_id"] = r.case_id;
    j["sample_index"] = r.sample_index;
    j["branch"] = std::string(reward::to_string(score.branch));
    j["s_format"] = score.s_format;
    j["s_f1"] = score.s_f1;
    j["s_recall"] = score.s_recall;
    j["s_precision"] = score.s_precision;
    j["total"] = score.total;
    out.get() << j.dump() << '\n';
  }
  out.commit();
  return 0;
}

int cmd_align(const std::string& cases, const std::string& judgments, const std::string& out_path, bool table,
              Streams s) {
  const auto items = objective::alignment_items(read_cases_arg(cases, s.in), read_judgments_arg(judgments, s.in));
  const auto report = objective::alignment_report(items);
  Output out(out_path, s.out);
  if (table) out.get() << objective::render_table(report);
  else out.get() << objective::to_json(report).dump() << '\n';
  out.commit();
  return 0;
}

int cmd_refine_prompt(const std::string& cases, const std::string& judgments, const std::string& mode_name,
                      const std::string& out_path, Streams s) {
  const auto mode = client::parse_refine_mode(mode_name);
  std::map<std::string, cocl::JudgeRecord> first;
  if (!judgments.empty()) {
    for (auto& r : read_judgments_arg(judgments, s.in)) {
      auto it = first.find(r.case_id);
      if (it == first.end() || r.sample_index < it->second.sample_index) first[r.case_id] = std::move(r);
    }
  }
  Output out(out_path, s.out);
  for (const auto& c : read_cases_arg(cases, s.in)) {
    std::optional<cocl::JudgeOutput> judge;
    if (auto it = first.find(c.id); it != first.end()) judge = it->second.output;
    OrderedJson j;
    j["case_id"] = c.id;
    j["mode"] = std::string(client::to_string(mode));
    if (mode != client::RefineMode::NoGuidance && !judge) {
      throw ValidationError("no judge output for case '" + c.id + "'");
    }
    if (auto prompt = client::build_refiner_prompt(mode, c, judge)) j["prompt"] = *prompt;
    else j["skipped"] = "refine only bad";
    out.get() << j.dump() << '\n';
  }
  out.commit();
  return 0;
}

int cmd_latex_validate(const std::string& path, Streams s) {
  Input in(path, s.in);
  std::string line;
  std::size_t n = 0, bad = 0;
  while (std::getline(in.get(), line)) {
    ++n;
    if (line.empty()) continue;
    const bool ok = latex::validate_balanced(latex::strip_math_delimiters(line));
    if (!ok) ++bad;
    s.out << n << '\t' << (ok ? "ok" : "unbalanced") << '\n';
  }
  return bad ? 1 : 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err,
             const Hooks& hooks) {
  Streams s{in, out, err, hooks};
  CLI::App app{"Document parsing quality toolkit: error taxonomy, case synthesis, judging and scoring.", "docinspect"};
  app.set_version_flag("--version", std::string("docinspect ") + DOCINSPECT_VERSION);
  app.require_subcommand(1);
  Global g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config_path, "INI configuration file");
  auto* seed_opt = app.add_option("--seed", seed_value, "dataset seed (overrides the config)");

  // taxonomy
  std::string element;
  bool json = false;
  auto* taxonomy = app.add_subcommand("taxonomy", "list error types and levels");
  taxonomy->require_subcommand(1);
  auto* tax_list = taxonomy->add_subcommand("list", "list error types");
  auto* tax_levels = taxonomy->add_subcommand("levels", "list error levels");
  for (auto* sub : {tax_list, tax_levels}) {
    sub->add_option("--element", element, "text, table or equation");
    sub->add_flag("--json", json, "JSON output");
  }

  // corpus
  std::string path = "-";
  bool records_flag = false;
  auto* corpus = app.add_subcommand("corpus", "inspect case files");
  corpus->require_subcommand(1);
  auto* corpus_stats = corpus->add_subcommand("stats", "distribution statistics of a case file");
  corpus_stats->add_option("file", path, "case JSONL or -");
  corpus_stats->add_flag("--json", json, "JSON output");
  auto* corpus_validate = corpus->add_subcommand("validate", "check a case or record file");
  corpus_validate->add_option("file", path, "JSONL file or -");
  corpus_validate->add_flag("--records", records_flag, "the file holds element records");

  // synth
  SynthOptions so;
  auto* synth = app.add_subcommand("synth", "synthesize single-error cases");
  synth->require_subcommand(1);
  auto* synth_text = synth->add_subcommand("text", "rule-based text error");
  auto* synth_table = synth->add_subcommand("table", "rule-based table error");
  auto* synth_llm = synth->add_subcommand("llm", "LLM-guided error, or real-world corruption selection");
  for (auto* sub : {synth_text, synth_table, synth_llm}) {
    sub->add_option("--error", so.error, "error type id")->required();
    sub->add_option("--records", so.records, "element records JSONL or -")->required();
    sub->add_option("--out", so.out, "output case JSONL (default: standard output)");
  }
  synth_llm->add_option("--candidates", so.candidates, "candidate predictions JSONL for corruption selection");
  add_client_options(synth_llm, so.client);

  // compose
  ComposeOptions co;
  auto* compose = app.add_subcommand("compose", "compose good, single- and multi-error cases to a target mix");
  compose->add_option("--target", co.target, "preset name or target INI file (default: config)");
  compose->add_option("--records", co.records, "element records JSONL or -")->required();
  compose->add_option("--out", co.out, "output case JSONL (default: standard output)");
  compose->add_option("--n", co.n, "number of cases (default: number of records)");
  compose->add_option("--log", co.log, "write degradations here instead of the error stream");
  compose->add_flag("--plan-only", co.plan_only, "emit the sampled plan without materializing cases");
  add_client_options(compose, co.client);

  // cocl
  std::string cases_path, preset_name = "cocl", out_path;
  bool raw = false;
  auto* cocl_cmd = app.add_subcommand("cocl", "judge prompts and judge output parsing");
  cocl_cmd->require_subcommand(1);
  auto* cocl_render = cocl_cmd->add_subcommand("render", "render the judge prompt");
  cocl_render->add_option("--cases", cases_path, "case JSONL; emits one prompt per case");
  cocl_render->add_option("--element", element, "element kind of a single prediction");
  cocl_render->add_option("--input", path, "prediction text file or - (with --element)");
  cocl_render->add_option("--preset", preset_name, "cocl, cot or nocot");
  cocl_render->add_option("--out", out_path, "output file");
  auto* cocl_parse = cocl_cmd->add_subcommand("parse", "parse judge outputs");
  cocl_parse->add_option("file", path, "judgment JSONL or -");
  cocl_parse->add_flag("--raw", raw, "the input is a single raw model output");
  cocl_parse->add_option("--out", out_path, "output file");

  // judge
  JudgeOptions jo;
  auto* judge = app.add_subcommand("judge", "run a judge model over cases");
  judge->require_subcommand(1);
  auto* judge_run = judge->add_subcommand("run", "collect k judge samples per case (resumable)");
  judge_run->add_option("--cases", jo.cases, "case JSONL or -")->required();
  judge_run->add_option("--out", jo.out, "judgment JSONL")->required();
  judge_run->add_option("--k", jo.k, "samples per case");
  judge_run->add_option("--preset", jo.preset, "cocl, cot or nocot");
  judge_run->add_option("--image-dir", jo.image_dir, "base directory for image_ref");
  add_client_options(judge_run, jo.client);

  // score
  ScoreOptions sc;
  auto* score = app.add_subcommand("score", "case F1 and error-type P/R/F1");
  score->add_option("--gold", sc.gold, "case JSONL")->required();
  score->add_option("--pred", sc.pred, "judgment JSONL")->required();
  score->add_option("--k", sc.k, "pass@k");
  score->add_option("--element", sc.element, "restrict to one element kind");
  score->add_option("--out", sc.out, "output file");
  auto* json_flag = score->add_flag("--json", sc.json, "JSON report");
  score->add_flag("--table", sc.table, "text table (default)")->excludes(json_flag);
  score->add_flag("--best-of-k", sc.best_of_k, "best single sample instead of the union");

  // reward
  RewardCliOptions ro;
  auto* reward_cmd = app.add_subcommand("reward", "score judge outputs with the training reward");
  reward_cmd->add_option("--gold", ro.gold, "case JSONL")->required();
  reward_cmd->add_option("--pred", ro.pred, "judgment JSONL")->required();
  reward_cmd->add_option("--scheme", ro.scheme, "asymmetric or f1");
  reward_cmd->add_flag("--graded-format", ro.graded_format, "partial format credit");
  reward_cmd->add_option("--w-format", ro.w_format, "format weight");
  reward_cmd->add_option("--w-recall", ro.w_recall, "recall weight");
  reward_cmd->add_option("--w-precision", ro.w_precision, "precision weight");
  reward_cmd->add_option("--out", ro.out, "output file");

  // align
  std::string judgments_path;
  bool table = false;
  auto* align = app.add_subcommand("align", "objective metrics bucketed by judged errors");
  align->add_option("--cases", cases_path, "case JSONL")->required();
  align->add_option("--judgments", judgments_path, "judgment JSONL")->required();
  align->add_option("--out", out_path, "output file");
  align->add_flag("--table", table, "text table instead of JSON");

  // refine-prompt
  std::string mode = "none";
  auto* refine = app.add_subcommand("refine-prompt", "render refinement prompts");
  refine->add_option("--cases", cases_path, "case JSONL")->required();
  refine->add_option("--judgments", judgments_path, "judgment JSONL (guided modes)");
  refine->add_option("--mode", mode, "none, binary or detailed");
  refine->add_option("--out", out_path, "output file");

  // latex
  auto* latex_cmd = app.add_subcommand("latex", "LaTeX utilities");
  latex_cmd->require_subcommand(1);
  auto* latex_validate = latex_cmd->add_subcommand("validate", "check brace and \\left/\\right balance per line");
  latex_validate->add_option("file", path, "formula file or -");

  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" || arg == "--seed") {
      ++i;
      continue;
    }
    if (arg.rfind("-", 0) == 0) continue;
    if (!app.get_subcommand_no_throw(arg)) {
      err << "unknown subcommand '" << arg << "'\n" << app.help();
      return 1;
    }
    break;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    if (!e.get_exit_code()) return 0;
    err << app.help();
    return 1;
  }
  if (seed_opt->count()) g.seed = seed_value;

  try {
    if (tax_list->parsed()) return cmd_taxonomy_list(element, json, s);
    if (tax_levels->parsed()) return cmd_taxonomy_levels(element, json, s);
    if (corpus_stats->parsed()) return cmd_corpus_stats(path, json, s);
    if (corpus_validate->parsed()) return cmd_corpus_validate(path, records_flag, s);
    if (synth_text->parsed()) return synth_single(so, g, s, ElementKind::Text, false);
    if (synth_table->parsed()) return synth_single(so, g, s, ElementKind::Table, false);
    if (synth_llm->parsed()) {
      if (so.error == "table_recognition_corruption") return synth_corruption(so, g, s);
      return synth_single(so, g, s, ElementKind::Text, true);
    }
    if (compose->parsed()) return cmd_compose(co, g, s);
    if (cocl_render->parsed()) return cmd_cocl_render(cases_path, element, path, preset_name, out_path, s);
    if (cocl_parse->parsed()) return cmd_cocl_parse(path, raw, out_path, s);
    if (judge_run->parsed()) return cmd_judge_run(jo, g, s);
    if (score->parsed()) return cmd_score(sc, s);
    if (reward_cmd->parsed()) return cmd_reward(ro, s);
    if (align->parsed()) return cmd_align(cases_path, judgments_path, out_path, table, s);
    if (refine->parsed()) return cmd_refine_prompt(cases_path, judgments_path, mode, out_path, s);
    if (latex_validate->parsed()) return cmd_latex_validate(path, s);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ClientError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace docinspect::cli
