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

#include <filesystem>
#include <memory>
#include <string>

#include "clarify/core/error.hpp"
#include "clarify/core/json_io.hpp"
#include "clarify/service/service.hpp"

namespace clarify::service {

int http_status(ErrorCode code);

Json to_json(const Task& task);
Json to_json(const AccountInfo& info);
Json to_json(const Regeneration& r);

struct HttpOptions {
  std::filesystem::path static_dir;  // annotation UI bundle, optional
};

// JSON API over an AnnotationService. Requests carry
// "Authorization: Bearer <token>"; admin routes take the admin token.
class HttpServer {
 public:
  HttpServer(AnnotationService& service, HttpOptions options = {});
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace clarify::service
