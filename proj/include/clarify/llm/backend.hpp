// Copyright 2026 The Clarify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <vector>

#include <json.hpp>

#include "clarify/llm/prompts.hpp"

namespace clarify::llm {

struct RetryPolicy {
  std::size_t max_attempts = 4;
  double backoff_base_ms = 500.0;  // delay before retry i is base * 2^(i-1)
};

struct BackendConfig {
  std::string name;
  std::string kind = "http";  // "http" or "mock"
  std::string base_url;
  std::string model;
  std::string api_key_env;  // empty: no Authorization header
  double temperature = 0.0;
  std::size_t max_in_flight = 4;
  RetryPolicy retry;
  double timeout_seconds = 60.0;
  std::filesystem::path transcript;  // mock backends
};

// Throws Error(kInvalidArgument) on a violated invariant.
void check_backend_config(const BackendConfig& c);

void to_json(nlohmann::json& j, const BackendConfig& c);
void from_json(const nlohmann::json& j, BackendConfig& c);

// Either a JSON array of configs or {"backends": [...]}.
std::vector<BackendConfig> load_backend_configs(const std::filesystem::path& path);

struct Completion {
  std::string text;
  std::string model;
  std::size_t retries = 0;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual Completion complete(const Messages& messages) = 0;
  virtual const BackendConfig& config() const = 0;
};

// Request body sent to {base_url}/chat/completions.
nlohmann::json chat_request_body(const BackendConfig& c, const Messages& messages);

// Stable key of a request: 16 hex digits of FNV-1a over {model, messages}.
std::string request_key(const std::string& model, const Messages& messages);

// Counts requests in flight and blocks above the cap.
class InFlightGate {
 public:
  explicit InFlightGate(std::size_t cap);
  void acquire();
  void release();
  std::size_t peak() const { return peak_.load(); }

 private:
  std::counting_semaphore<> sem_;
  std::atomic<std::size_t> current_{0};
  std::atomic<std::size_t> peak_{0};
};

// OpenAI-compatible HTTP backend. Retries network errors, 429 and 5xx with
// exponential backoff (a Retry-After header in seconds lengthens the delay).
class HttpChatBackend : public ChatBackend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpChatBackend(BackendConfig config, Sleeper sleeper = {});
  Completion complete(const Messages& messages) override;
  const BackendConfig& config() const override { return config_; }
  std::size_t peak_in_flight() const { return gate_.peak(); }

 private:
  BackendConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // path part of base_url, without trailing slash
  Sleeper sleeper_;
  InFlightGate gate_;
};

// Replays responses from a transcript: JSON lines {"key": ..., "response": ...}.
// Unknown requests throw Error(kNotFound).
class MockBackend : public ChatBackend {
 public:
  explicit MockBackend(BackendConfig config);
  MockBackend(BackendConfig config, std::map<std::string, std::string> responses);

  Completion complete(const Messages& messages) override;
  const BackendConfig& config() const override { return config_; }

 private:
  BackendConfig config_;
  std::map<std::string, std::string> responses_;
};

// Wraps a callable; used for scripted tests and transcript recording.
class FunctionBackend : public ChatBackend {
 public:
  using Fn = std::function<std::string(const Messages&)>;
  FunctionBackend(BackendConfig config, Fn fn) : config_(std::move(config)), fn_(std::move(fn)) {}

  Completion complete(const Messages& messages) override;
  const BackendConfig& config() const override { return config_; }

 private:
  BackendConfig config_;
  Fn fn_;
};

// Records every request/response pair passing through another backend, in
// the transcript format MockBackend reads.
class RecordingBackend : public ChatBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<ChatBackend> inner) : inner_(std::move(inner)) {}

  Completion complete(const Messages& messages) override;
  const BackendConfig& config() const override { return inner_->config(); }
  // Entries sorted by key, one JSON object per line.
  void write_transcript(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<ChatBackend> inner_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> entries_;
};

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config);

}  // namespace clarify::llm
