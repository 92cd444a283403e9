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

#include "clarify/llm/backend.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "clarify/core/error.hpp"
#include "clarify/core/json_io.hpp"
#include "clarify/core/rng.hpp"

namespace clarify::llm {
namespace {

std::string excerpt(const std::string& s) {
  constexpr std::size_t kMax = 300;
  return s.size() <= kMax ? s : s.substr(0, kMax) + "...";
}

struct Url {
  std::string origin;
  std::string path;
};

Url split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "base_url lacks a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported scheme in base_url: " + url);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    throw Error(ErrorCode::kInvalidArgument, "https backends need a build with TLS support: " + url);
  }
#endif
  auto path_start = url.find('/', scheme_end + 3);
  Url out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

template <typename Client>
void set_timeouts(Client& cli, double seconds) {
  const auto whole = static_cast<time_t>(seconds);
  const auto micros = static_cast<time_t>((seconds - static_cast<double>(whole)) * 1e6);
  cli.set_connection_timeout(whole, micros);
  cli.set_read_timeout(whole, micros);
  cli.set_write_timeout(whole, micros);
}

Completion parse_response(const std::string& body, const BackendConfig& c) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kProtocol, c.name + ": response is not JSON: " + excerpt(body));
  }
  Completion out;
  try {
    out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    out.model = j.value("model", c.model);
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      out.prompt_tokens = u->value("prompt_tokens", std::size_t{0});
      out.completion_tokens = u->value("completion_tokens", std::size_t{0});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProtocol, c.name + ": unexpected response shape: " + e.what());
  }
  return out;
}

}  // namespace

void check_backend_config(const BackendConfig& c) {
  if (c.name.empty()) throw Error(ErrorCode::kInvalidArgument, "backend without a name");
  const std::string where = "backend " + c.name + ": ";
  if (c.kind != "http" && c.kind != "mock") throw Error(ErrorCode::kInvalidArgument, where + "unknown kind " + c.kind);
  if (c.max_in_flight < 1) throw Error(ErrorCode::kInvalidArgument, where + "max_in_flight must be >= 1");
  if (!(c.temperature >= 0.0)) throw Error(ErrorCode::kInvalidArgument, where + "temperature must be >= 0");
  if (c.retry.max_attempts < 1) throw Error(ErrorCode::kInvalidArgument, where + "max_attempts must be >= 1");
  if (!(c.retry.backoff_base_ms >= 0.0)) throw Error(ErrorCode::kInvalidArgument, where + "negative backoff");
  if (!(c.timeout_seconds > 0.0)) throw Error(ErrorCode::kInvalidArgument, where + "timeout must be positive");
  if (c.kind == "http" && c.base_url.empty()) throw Error(ErrorCode::kInvalidArgument, where + "base_url required");
}

void to_json(nlohmann::json& j, const BackendConfig& c) {
  j = {{"name", c.name},
       {"kind", c.kind},
       {"base_url", c.base_url},
       {"model", c.model},
       {"api_key_env", c.api_key_env},
       {"temperature", c.temperature},
       {"max_in_flight", c.max_in_flight},
       {"retry", {{"max_attempts", c.retry.max_attempts}, {"backoff_base_ms", c.retry.backoff_base_ms}}},
       {"timeout_seconds", c.timeout_seconds}};
  if (!c.transcript.empty()) j["transcript"] = c.transcript.string();
}

void from_json(const nlohmann::json& j, BackendConfig& c) {
  c = BackendConfig{};
  c.name = j.at("name").get<std::string>();
  c.kind = j.value("kind", c.kind);
  c.base_url = j.value("base_url", c.base_url);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.temperature = j.value("temperature", c.temperature);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  if (auto r = j.find("retry"); r != j.end()) {
    c.retry.max_attempts = r->value("max_attempts", c.retry.max_attempts);
    c.retry.backoff_base_ms = r->value("backoff_base_ms", c.retry.backoff_base_ms);
  }
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.transcript = j.value("transcript", std::string{});
}

std::vector<BackendConfig> load_backend_configs(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  const auto& list = j.is_object() ? j.at("backends") : j;
  std::vector<BackendConfig> out;
  try {
    for (const auto& item : list) {
      auto c = item.get<BackendConfig>();
      // Relative transcript paths are relative to the config file.
      if (!c.transcript.empty() && c.transcript.is_relative()) c.transcript = path.parent_path() / c.transcript;
      check_backend_config(c);
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return out;
}

nlohmann::json chat_request_body(const BackendConfig& c, const Messages& messages) {
  return {{"model", c.model}, {"messages", to_json(messages)}, {"temperature", c.temperature}};
}

std::string request_key(const std::string& model, const Messages& messages) {
  const nlohmann::json j = {{"model", model}, {"messages", to_json(messages)}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(j.dump()));
  return buf;
}

InFlightGate::InFlightGate(std::size_t cap)
    : sem_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(cap, 1))) {}

void InFlightGate::acquire() {
  sem_.acquire();
  const auto now = ++current_;
  auto peak = peak_.load();
  while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
  }
}

void InFlightGate::release() {
  --current_;
  sem_.release();
}

HttpChatBackend::HttpChatBackend(BackendConfig config, Sleeper sleeper)
    : config_(std::move(config)), sleeper_(std::move(sleeper)), gate_(config_.max_in_flight) {
  check_backend_config(config_);
  auto url = split_url(config_.base_url);
  origin_ = url.origin;
  path_prefix_ = url.path;
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Completion HttpChatBackend::complete(const Messages& messages) {
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) {
      throw Error(ErrorCode::kAuthentication,
                  config_.name + ": environment variable " + config_.api_key_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const std::string body = chat_request_body(config_, messages).dump();
  const std::string path = path_prefix_ + "/chat/completions";

  gate_.acquire();
  struct Release {
    InFlightGate& g;
    ~Release() { g.release(); }
  } release{gate_};

  std::string last;
  for (std::size_t attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    httplib::Client cli(origin_);
    set_timeouts(cli, config_.timeout_seconds);
    auto res = cli.Post(path, headers, body, "application/json");
    double delay_ms = config_.retry.backoff_base_ms * std::ldexp(1.0, static_cast<int>(attempt) - 1);
    if (!res) {
      last = "network error: " + httplib::to_string(res.error());
    } else if (res->status >= 200 && res->status < 300) {
      auto out = parse_response(res->body, config_);
      out.retries = attempt - 1;
      return out;
    } else if (res->status == 429 || res->status >= 500) {
      last = "HTTP " + std::to_string(res->status);
      if (res->has_header("Retry-After")) {
        try {
          delay_ms = std::max(delay_ms, 1000.0 * std::stod(res->get_header_value("Retry-After")));
        } catch (const std::exception&) {
        }
      }
    } else if (res->status == 401 || res->status == 403) {
      throw Error(ErrorCode::kAuthentication,
                  config_.name + ": HTTP " + std::to_string(res->status) + ": " + excerpt(res->body));
    } else {
      throw Error(ErrorCode::kBackend,
                  config_.name + ": HTTP " + std::to_string(res->status) + ": " + excerpt(res->body));
    }
    if (attempt < config_.retry.max_attempts) {
      sleeper_(std::chrono::milliseconds(static_cast<long long>(delay_ms)));
    }
  }
  throw Error(ErrorCode::kBackend, config_.name + ": giving up after " +
                                       std::to_string(config_.retry.max_attempts) +
                                       " attempts, last failure: " + last);
}

MockBackend::MockBackend(BackendConfig config) : config_(std::move(config)) {
  if (config_.transcript.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mock backend " + config_.name + " needs a transcript");
  }
  for_each_json_line(config_.transcript, [&](const Json& j, std::size_t) {
    responses_[j.at("key").get<std::string>()] = j.at("response").get<std::string>();
  });
}

MockBackend::MockBackend(BackendConfig config, std::map<std::string, std::string> responses)
    : config_(std::move(config)), responses_(std::move(responses)) {}

Completion MockBackend::complete(const Messages& messages) {
  const auto key = request_key(config_.model, messages);
  auto it = responses_.find(key);
  if (it == responses_.end()) {
    throw Error(ErrorCode::kNotFound, config_.name + ": no transcript entry for request " + key);
  }
  Completion out;
  out.text = it->second;
  out.model = config_.model;
  return out;
}

Completion FunctionBackend::complete(const Messages& messages) {
  Completion out;
  out.text = fn_(messages);
  out.model = config_.model;
  return out;
}

Completion RecordingBackend::complete(const Messages& messages) {
  auto out = inner_->complete(messages);
  std::lock_guard lock(mu_);
  entries_[request_key(inner_->config().model, messages)] = out.text;
  return out;
}

void RecordingBackend::write_transcript(const std::filesystem::path& path) const {
  std::vector<Json> rows;
  {
    std::lock_guard lock(mu_);
    for (const auto& [k, v] : entries_) rows.push_back({{"key", k}, {"response", v}});
  }
  std::ostringstream out;
  write_jsonl(out, rows);
  write_file_atomic(path, out.str());
}

std::shared_ptr<ChatBackend> make_backend(const BackendConfig& config) {
  check_backend_config(config);
  if (config.kind == "mock") return std::make_shared<MockBackend>(config);
  return std::make_shared<HttpChatBackend>(config);
}

}  // namespace clarify::llm
