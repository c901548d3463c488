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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "docinspect/modelclient.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "docinspect/digest.hpp"
#include "docinspect/error.hpp"
#include "docinspect/rng.hpp"
#include "docinspect/unicode.hpp"

namespace docinspect::client {

namespace fs = std::filesystem;

void ClientProfile::validate() const {
  if (model.empty()) throw ValidationError("client profile '" + name + "': model is required");
  if (!(temperature >= 0)) throw ValidationError("client profile '" + name + "': temperature must be >= 0");
  if (max_retries < 0) throw ValidationError("client profile '" + name + "': max_retries must be >= 0");
  if (max_concurrency < 1) throw ValidationError("client profile '" + name + "': max_concurrency must be >= 1");
  if (max_tokens < 1) throw ValidationError("client profile '" + name + "': max_tokens must be >= 1");
  if (!(timeout_seconds > 0)) throw ValidationError("client profile '" + name + "': timeout_seconds must be > 0");
}

ImagePayload load_image(const std::string& image_ref, const std::string& base_dir) {
  fs::path path(image_ref);
  if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read image '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string ext = unicode::ascii_lower(path.extension().string());
  std::string media = "application/octet-stream";
  if (ext == ".png") media = "image/png";
  else if (ext == ".jpg" || ext == ".jpeg") media = "image/jpeg";
  else if (ext == ".webp") media = "image/webp";
  else if (ext == ".gif") media = "image/gif";
  return {base64_encode(buf.str()), media};
}

Json build_request_body(const ClientProfile& profile, const ChatRequest& request) {
  Json messages = Json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  if (request.image) {
    Json parts = Json::array();
    parts.push_back({{"type", "image_url"},
                     {"image_url", {{"url", "data:" + request.image->media_type + ";base64," + request.image->base64}}}});
    parts.push_back({{"type", "text"}, {"text", request.user}});
    messages.push_back({{"role", "user"}, {"content", parts}});
  } else {
    messages.push_back({{"role", "user"}, {"content", request.user}});
  }
  Json body;
  body["model"] = profile.model;
  body["messages"] = messages;
  body["temperature"] = request.temperature.value_or(profile.temperature);
  body["max_tokens"] = request.max_tokens.value_or(profile.max_tokens);
  if (request.seed) body["seed"] = *request.seed;
  return body;
}

std::string request_hash(const ClientProfile& profile, const ChatRequest& request) {
  return sha256_hex(build_request_body(profile, request).dump());
}

ChatResponse parse_response_body(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception& e) {
    throw ClientError(ClientErrorKind::Malformed, std::string("response is not JSON: ") + e.what());
  }
  try {
    const Json& choice = j.at("choices").at(0);
    const Json& content = choice.at("message").at("content");
    ChatResponse r;
    if (content.is_string()) {
      r.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.contains("text")) r.text += part.at("text").get<std::string>();
      }
    } else {
      throw ClientError(ClientErrorKind::Malformed, "response content is neither text nor parts");
    }
    if (auto it = choice.find("finish_reason"); it != choice.end() && it->is_string()) r.finish_reason = *it;
    if (auto it = j.find("usage"); it != j.end() && it->is_object()) {
      r.prompt_tokens = it->value("prompt_tokens", 0L);
      r.completion_tokens = it->value("completion_tokens", 0L);
    }
    return r;
  } catch (const Json::exception& e) {
    throw ClientError(ClientErrorKind::Malformed, std::string("response lacks choices[0].message.content: ") + e.what());
  }
}

namespace {

class HttpTransport : public Transport {
 public:
  HttpResult post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                  const std::string& body, double timeout_seconds) override {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ValidationError("endpoint must be an absolute URL: '" + url + "'");
    const std::size_t path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client cli(origin);
    const auto secs = static_cast<time_t>(timeout_seconds);
    const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Post(path, h, body, "application/json");
    HttpResult out;
    if (!res) {
      const auto err = res.error();
      out.timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
      out.error = httplib::to_string(err);
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttpTransport>(); }

ChatCompletionsClient::ChatCompletionsClient(ClientProfile profile, std::unique_ptr<Transport> transport,
                                             Sleeper sleeper, double backoff_base_seconds)
    : profile_(std::move(profile)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      backoff_base_(backoff_base_seconds) {
  profile_.validate();
  if (!sleeper_) {
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
}

ChatResponse ChatCompletionsClient::complete(const ChatRequest& request) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!profile_.auth_env.empty()) {
    const char* token = std::getenv(profile_.auth_env.c_str());
    if (!token || !*token) {
      throw ClientError(ClientErrorKind::AuthMissing,
                        "environment variable '" + profile_.auth_env + "' holding the API token is not set");
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + token);
  }
  const std::string body = build_request_body(profile_, request).dump();
  Rng jitter(fnv1a64(body));
  for (int attempt = 0;; ++attempt) {
    HttpResult res = transport_->post(profile_.endpoint, headers, body, profile_.timeout_seconds);
    std::optional<ClientError> failure;
    if (!res.error.empty() || res.timed_out) {
      failure.emplace(res.timed_out ? ClientErrorKind::Timeout : ClientErrorKind::Transport,
                      "request to '" + profile_.endpoint + "' failed: " + (res.error.empty() ? "timeout" : res.error));
    } else if (res.status < 200 || res.status >= 300) {
      failure.emplace(ClientErrorKind::Http, "HTTP " + std::to_string(res.status) + " from '" + profile_.endpoint + "'",
                      res.status);
      const bool retryable = res.status == 429 || res.status >= 500;
      if (!retryable) throw *failure;
    } else {
      return parse_response_body(res.body);
    }
    if (attempt >= profile_.max_retries) throw *failure;
    const double base = backoff_base_ * std::pow(2.0, attempt);
    sleeper_(base + base * jitter.unit());
  }
}

ReplayClient::ReplayClient(ClientProfile profile, std::string directory)
    : profile_(std::move(profile)), directory_(std::move(directory)) {}

ChatResponse ReplayClient::complete(const ChatRequest& request) {
  const std::string hash = request_hash(profile_, request);
  const fs::path path = fs::path(directory_) / (hash + ".json");
  std::ifstream in(path);
  if (!in) throw ClientError(ClientErrorKind::ReplayMiss, "no recorded response for request " + hash);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ClientError(ClientErrorKind::Malformed, "transcript '" + path.string() + "' is not JSON: " + e.what());
  }
  try {
    const Json& r = j.at("response");
    ChatResponse out;
    out.text = r.at("text").get<std::string>();
    out.finish_reason = r.value("finish_reason", "");
    if (auto it = r.find("usage"); it != r.end()) {
      out.prompt_tokens = it->value("prompt_tokens", 0L);
      out.completion_tokens = it->value("completion_tokens", 0L);
    }
    return out;
  } catch (const Json::exception& e) {
    throw ClientError(ClientErrorKind::Malformed, "transcript '" + path.string() + "' lacks response.text");
  }
}

void write_transcript(const std::string& directory, const ClientProfile& profile, const ChatRequest& request,
                      const ChatResponse& response) {
  fs::create_directories(directory);
  OrderedJson j;
  j["request"] = OrderedJson::parse(build_request_body(profile, request).dump());
  OrderedJson r;
  r["text"] = response.text;
  r["finish_reason"] = response.finish_reason;
  r["usage"] = {{"prompt_tokens", response.prompt_tokens}, {"completion_tokens", response.completion_tokens}};
  j["response"] = r;
  const fs::path path = fs::path(directory) / (request_hash(profile, request) + ".json");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write transcript '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

RecordingClient::RecordingClient(ModelClient& inner, std::string directory)
    : inner_(inner), directory_(std::move(directory)) {}

ChatResponse RecordingClient::complete(const ChatRequest& request) {
  ChatResponse r = inner_.complete(request);
  write_transcript(directory_, inner_.profile(), request, r);
  return r;
}

std::uint64_t sample_seed(const std::string& case_id, int sample_index) {
  return derive_seed(0, case_id, "judge_sample_" + std::to_string(sample_index));
}

JudgeRunSummary run_judge(ModelClient& client, const std::vector<ParsingCase>& cases, const PromptBuilder& builder,
                          const JudgeRunOptions& options, const std::string& out_path, const OutputHeader& header) {
  if (options.k < 1) throw ValidationError("k must be at least 1");
  if (options.max_concurrency < 1) throw ValidationError("max_concurrency must be at least 1");
  std::set<std::pair<std::string, int>> done;
  const bool exists = fs::exists(out_path) && fs::file_size(out_path) > 0;
  if (exists) {
    std::ifstream in(out_path);
    for_each_json_line(in, [&](const Json& j, std::size_t) {
      done.emplace(j.at("case_id").get<std::string>(), j.at("sample_index").get<int>());
    });
  }
  std::ofstream out(out_path, std::ios::app);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  if (!exists) write_header(out, header);

  struct Task {
    const ParsingCase* c;
    int sample;
  };
  std::vector<Task> tasks;
  JudgeRunSummary summary;
  for (const auto& c : cases) {
    for (int s = 0; s < options.k; ++s) {
      if (done.count({c.id, s})) {
        ++summary.skipped;
        continue;
      }
      tasks.push_back({&c, s});
    }
  }
  struct Outcome {
    bool ready = false;
    bool ok = false;
    std::string text;
  };
  std::vector<Outcome> outcomes(tasks.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      Outcome o;
      try {
        o.text = client.complete(builder(*tasks[i].c, tasks[i].sample)).text;
        o.ok = true;
      } catch (const std::exception& e) {
        o.text = e.what();
      }
      o.ready = true;
      {
        std::lock_guard<std::mutex> lock(mu);
        outcomes[i] = std::move(o);
      }
      cv.notify_all();
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(options.max_concurrency),
                                                                        std::max<std::size_t>(1, tasks.size())));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);

  std::ofstream failures;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Outcome o;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return outcomes[i].ready; });
      o = std::move(outcomes[i]);
    }
    OrderedJson line;
    line["case_id"] = tasks[i].c->id;
    line["sample_index"] = tasks[i].sample;
    if (o.ok) {
      line["raw"] = o.text;
      out << line.dump() << '\n';
      out.flush();
      ++summary.written;
    } else {
      if (!failures.is_open()) {
        failures.open(out_path + ".failures.jsonl", std::ios::app);
        if (!failures) throw IoError("cannot open failure log for '" + out_path + "'");
      }
      line["error"] = o.text;
      failures << line.dump() << '\n';
      ++summary.failed;
    }
  }
  for (auto& t : pool) t.join();
  return summary;
}

}  // namespace docinspect::client
