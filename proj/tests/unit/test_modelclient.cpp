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

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <thread>

#include "docinspect/cocl.hpp"
#include "docinspect/error.hpp"
#include "docinspect/modelclient.hpp"
#include "e2e.hpp"

namespace fs = std::filesystem;

namespace docinspect::client {
namespace {

std::string ok_body(const std::string& text) {
  return Json{{"choices", {{{"message", {{"content", text}}}, {"finish_reason", "stop"}}}}}.dump();
}

class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::deque<HttpResult> script) : script_(std::move(script)) {}
  HttpResult post(const std::string&, const std::vector<std::pair<std::string, std::string>>& headers,
                  const std::string&, double) override {
    ++calls;
    last_headers = headers;
    HttpResult r = script_.front();
    if (script_.size() > 1) script_.pop_front();
    return r;
  }
  int calls = 0;
  std::vector<std::pair<std::string, std::string>> last_headers;

 private:
  std::deque<HttpResult> script_;
};

ClientProfile profile() {
  ClientProfile p;
  p.endpoint = "http://localhost:1/v1/chat/completions";
  p.model = "judge";
  return p;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("docinspect_mc_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(Client, RetriesRateLimitOnce) {
  auto t = std::make_unique<ScriptedTransport>(std::deque<HttpResult>{{429, "", false, ""}, {200, ok_body("hi"), false, ""}});
  auto* raw = t.get();
  std::vector<double> sleeps;
  ChatCompletionsClient c(profile(), std::move(t), [&](double s) { sleeps.push_back(s); });
  EXPECT_EQ(c.complete({"", "q"}).text, "hi");
  EXPECT_EQ(raw->calls, 2);
  ASSERT_EQ(sleeps.size(), 1u);
  EXPECT_GE(sleeps[0], 0.5);
  EXPECT_LE(sleeps[0], 1.0);
}

TEST(Client, GivesUpAfterMaxRetries) {
  auto t = std::make_unique<ScriptedTransport>(std::deque<HttpResult>{{503, "", false, ""}});
  auto* raw = t.get();
  ChatCompletionsClient c(profile(), std::move(t), [](double) {});
  try {
    c.complete({"", "q"});
    FAIL();
  } catch (const ClientError& e) {
    EXPECT_EQ(e.client_kind(), ClientErrorKind::Http);
    EXPECT_EQ(e.status(), 503);
  }
  EXPECT_EQ(raw->calls, profile().max_retries + 1);
}

TEST(Client, ClientErrorsAreNotRetried) {
  auto t = std::make_unique<ScriptedTransport>(std::deque<HttpResult>{{400, "", false, ""}});
  auto* raw = t.get();
  ChatCompletionsClient c(profile(), std::move(t), [](double) {});
  EXPECT_THROW(c.complete({"", "q"}), ClientError);
  EXPECT_EQ(raw->calls, 1);
}

TEST(Client, TimeoutIsTyped) {
  ChatCompletionsClient c(profile(), std::make_unique<ScriptedTransport>(std::deque<HttpResult>{{0, "", true, ""}}),
                          [](double) {});
  try {
    c.complete({"", "q"});
    FAIL();
  } catch (const ClientError& e) {
    EXPECT_EQ(e.client_kind(), ClientErrorKind::Timeout);
  }
}

TEST(Client, AuthComesFromEnvironment) {
  auto p = profile();
  p.auth_env = "DOCINSPECT_TEST_TOKEN_UNSET";
  ::unsetenv(p.auth_env.c_str());
  ChatCompletionsClient missing(p, std::make_unique<ScriptedTransport>(std::deque<HttpResult>{{200, ok_body("x"), false, ""}}));
  try {
    missing.complete({"", "q"});
    FAIL();
  } catch (const ClientError& e) {
    EXPECT_EQ(e.client_kind(), ClientErrorKind::AuthMissing);
  }
  ::setenv(p.auth_env.c_str(), "tok", 1);
  auto t = std::make_unique<ScriptedTransport>(std::deque<HttpResult>{{200, ok_body("x"), false, ""}});
  auto* raw = t.get();
  ChatCompletionsClient present(p, std::move(t));
  present.complete({"", "q"});
  ASSERT_EQ(raw->last_headers.size(), 1u);
  EXPECT_EQ(raw->last_headers[0].second, "Bearer tok");
  ::unsetenv(p.auth_env.c_str());
}

TEST(Client, ProfileValidation) {
  auto p = profile();
  p.model.clear();
  EXPECT_THROW(p.validate(), ValidationError);
  p = profile();
  p.max_concurrency = 0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(RequestBody, ShapeAndHash) {
  ChatRequest r{"sys", "user text", ImagePayload{"QUJD", "image/png"}, 0.5, 100, 7};
  const Json body = build_request_body(profile(), r);
  EXPECT_EQ(body.at("model"), "judge");
  EXPECT_EQ(body.at("temperature"), 0.5);
  EXPECT_EQ(body.at("messages").size(), 2u);
  const Json& parts = body.at("messages")[1].at("content");
  bool has_image = false;
  for (const auto& part : parts) {
    if (part.at("type") == "image_url") has_image = part.at("image_url").at("url") == "data:image/png;base64,QUJD";
  }
  EXPECT_TRUE(has_image);
  const std::string h = request_hash(profile(), r);
  EXPECT_EQ(h.size(), 64u);
  EXPECT_EQ(h, request_hash(profile(), r));
  r.user += "!";
  EXPECT_NE(h, request_hash(profile(), r));
}

TEST(ResponseBody, Parsing) {
  EXPECT_EQ(parse_response_body(ok_body("abc")).text, "abc");
  EXPECT_THROW(parse_response_body("{}"), ClientError);
  EXPECT_THROW(parse_response_body("not json"), ClientError);
}

TEST(Replay, RecordThenReplayIsIdentical) {
  const fs::path dir = scratch("replay");
  ChatCompletionsClient live(profile(), std::make_unique<ScriptedTransport>(
                                            std::deque<HttpResult>{{200, ok_body("first"), false, ""}}));
  RecordingClient rec(live, dir.string());
  ChatRequest q{"s", "question"};
  EXPECT_EQ(rec.complete(q).text, "first");
  ReplayClient replay(profile(), dir.string());
  EXPECT_EQ(replay.complete(q).text, "first");
  try {
    replay.complete({"s", "other"});
    FAIL();
  } catch (const ClientError& e) {
    EXPECT_EQ(e.client_kind(), ClientErrorKind::ReplayMiss);
  }
  fs::remove_all(dir);
}

class CountingClient : public ModelClient {
 public:
  ChatResponse complete(const ChatRequest& r) override {
    const int now = ++active;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --active;
    ++calls;
    if (r.user == "fail") throw ClientError(ClientErrorKind::Http, "boom", 500);
    return {"<answer>Goodcase.</answer>", "stop"};
  }
  const ClientProfile& profile() const override { return p; }
  ClientProfile p = client::profile();
  std::atomic<int> active{0}, peak{0}, calls{0};
};

std::vector<ParsingCase> cases(int n) {
  std::vector<ParsingCase> out;
  for (int i = 0; i < n; ++i) {
    ParsingCase c;
    c.id = "case-" + std::to_string(i);
    c.ground_truth = c.prediction = "text";
    out.push_back(c);
  }
  return out;
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

TEST(RunJudge, OneLinePerSample) {
  const fs::path dir = scratch("run1");
  CountingClient c;
  const auto builder = [](const ParsingCase& pc, int) { return ChatRequest{"", pc.id}; };
  const auto s = run_judge(c, cases(3), builder, {1, 1, ""}, (dir / "j.jsonl").string(), default_header());
  EXPECT_EQ(s.written, 3u);
  EXPECT_EQ(line_count(dir / "j.jsonl"), 4u);  // header + 3
  fs::remove_all(dir);
}

TEST(RunJudge, ConcurrencyIsBounded) {
  const fs::path dir = scratch("run2");
  CountingClient c;
  const auto builder = [](const ParsingCase& pc, int) { return ChatRequest{"", pc.id}; };
  run_judge(c, cases(24), builder, {2, 3, ""}, (dir / "j.jsonl").string(), default_header());
  EXPECT_LE(c.peak.load(), 3);
  EXPECT_EQ(c.calls.load(), 48);
  const auto rs = cocl::read_judge_records_file((dir / "j.jsonl").string());
  ASSERT_EQ(rs.size(), 48u);
  EXPECT_EQ(rs[0].case_id, "case-0");
  EXPECT_EQ(rs[1].sample_index, 1);
  fs::remove_all(dir);
}

TEST(RunJudge, ResumesWithoutDuplicates) {
  const fs::path dir = scratch("run3");
  const std::string out = (dir / "j.jsonl").string();
  const auto builder = [](const ParsingCase& pc, int) { return ChatRequest{"", pc.id == "case-2" ? "fail" : pc.id}; };
  CountingClient first;
  const auto s1 = run_judge(first, cases(4), builder, {1, 2, ""}, out, default_header());
  EXPECT_EQ(s1.written, 3u);
  EXPECT_EQ(s1.failed, 1u);
  EXPECT_TRUE(fs::exists(out + ".failures.jsonl"));
  CountingClient second;
  const auto ok = [](const ParsingCase& pc, int) { return ChatRequest{"", pc.id}; };
  const auto s2 = run_judge(second, cases(4), ok, {1, 2, ""}, out, default_header());
  EXPECT_EQ(s2.skipped, 3u);
  EXPECT_EQ(s2.written, 1u);
  EXPECT_EQ(second.calls.load(), 1);
  std::set<std::string> ids;
  for (const auto& r : cocl::read_judge_records_file(out)) EXPECT_TRUE(ids.insert(r.case_id).second);
  EXPECT_EQ(ids.size(), 4u);
  fs::remove_all(dir);
}

TEST(RunJudge, SampleSeeds) {
  EXPECT_EQ(sample_seed("a", 0), sample_seed("a", 0));
  EXPECT_NE(sample_seed("a", 0), sample_seed("a", 1));
  EXPECT_NE(sample_seed("a", 0), sample_seed("b", 0));
}

}  // namespace
}  // namespace docinspect::client
