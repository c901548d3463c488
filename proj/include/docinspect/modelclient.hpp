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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "docinspect/corpus.hpp"

namespace docinspect::client {

struct ClientProfile {
  std::string name = "default";
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  std::string auth_env;  // name of the variable holding the bearer token
  double temperature = 1.0;
  int max_tokens = 2048;
  int max_retries = 3;
  double timeout_seconds = 60;
  int max_concurrency = 4;

  // Throws ValidationError naming the first bad field.
  void validate() const;
};

struct ImagePayload {
  std::string base64;
  std::string media_type;

  bool operator==(const ImagePayload&) const = default;
};

// Reads an image file and base64-encodes it. The media type follows the
// file extension. Throws IoError when the file cannot be read.
ImagePayload load_image(const std::string& image_ref, const std::string& base_dir = "");

struct ChatRequest {
  std::string system;
  std::string user;
  std::optional<ImagePayload> image;
  std::optional<double> temperature;  // falls back to the profile
  std::optional<int> max_tokens;
  std::optional<std::uint64_t> seed;
};

struct ChatResponse {
  std::string text;
  std::string finish_reason;
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

// Chat-completions request body (messages array, image as a data-URI part).
Json build_request_body(const ClientProfile& profile, const ChatRequest& request);
// SHA-256 of the request body; names the transcript file in replay stores.
std::string request_hash(const ClientProfile& profile, const ChatRequest& request);
// Throws ClientError(Malformed) when the body lacks choices[0].message.content.
ChatResponse parse_response_body(const std::string& body);

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual const ClientProfile& profile() const = 0;
};

struct HttpResult {
  int status = 0;
  std::string body;
  bool timed_out = false;
  std::string error;  // transport failure description; empty when a response arrived
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResult post(const std::string& url, const std::vector<std::pair<std::string, std::string>>& headers,
                          const std::string& body, double timeout_seconds) = 0;
};

std::unique_ptr<Transport> make_http_transport();

// Retries 429, 5xx, timeouts and transport failures with exponential backoff
// plus jitter; other statuses fail at once.
class ChatCompletionsClient : public ModelClient {
 public:
  using Sleeper = std::function<void(double seconds)>;
  ChatCompletionsClient(ClientProfile profile, std::unique_ptr<Transport> transport, Sleeper sleeper = {},
                        double backoff_base_seconds = 0.5);
  ChatResponse complete(const ChatRequest& request) override;
  const ClientProfile& profile() const override { return profile_; }

 private:
  ClientProfile profile_;
  std::unique_ptr<Transport> transport_;
  Sleeper sleeper_;
  double backoff_base_;
};

// Serves responses from a transcript directory holding <request-hash>.json.
class ReplayClient : public ModelClient {
 public:
  ReplayClient(ClientProfile profile, std::string directory);
  ChatResponse complete(const ChatRequest& request) override;
  const ClientProfile& profile() const override { return profile_; }

 private:
  ClientProfile profile_;
  std::string directory_;
};

// Forwards to another client and stores each exchange in a transcript directory.
class RecordingClient : public ModelClient {
 public:
  RecordingClient(ModelClient& inner, std::string directory);
  ChatResponse complete(const ChatRequest& request) override;
  const ClientProfile& profile() const override { return inner_.profile(); }

 private:
  ModelClient& inner_;
  std::string directory_;
};

void write_transcript(const std::string& directory, const ClientProfile& profile, const ChatRequest& request,
                      const ChatResponse& response);

struct JudgeRunOptions {
  int k = 1;
  int max_concurrency = 1;
  std::string image_base_dir;
};

struct JudgeRunSummary {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

using PromptBuilder = std::function<ChatRequest(const ParsingCase&, int sample_index)>;

// Seed for the n-th judge sample of a case.
std::uint64_t sample_seed(const std::string& case_id, int sample_index);

// Appends {case_id, sample_index, raw} lines to `out_path`, skipping pairs
// already present there. Failures go to `<out_path>.failures.jsonl` and the
// run continues. Lines are written in (case, sample) order.
JudgeRunSummary run_judge(ModelClient& client, const std::vector<ParsingCase>& cases, const PromptBuilder& builder,
                          const JudgeRunOptions& options, const std::string& out_path, const OutputHeader& header);

}  // namespace docinspect::client
